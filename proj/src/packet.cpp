#include "wwp/packet.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "wwp/residual.hpp"

namespace wwp {

Grid fast_grid(const Grid &slow, double eps, int n_points, double k)
{
    if (!(eps > 0.0)) throw ConfigError("packet: eps must be positive");
    Grid g(n_points, slow.length / eps);
    validate_packet_grids(slow, g, eps, k);
    return g;
}

void validate_packet_grids(const Grid &slow, const Grid &fast, double eps, double k)
{
    if (std::abs(fast.length * eps - slow.length) > 1e-10 * slow.length)
        throw ConfigError("packet: fast domain length must equal slow length / eps");
    const double modes = k * fast.length / (2.0 * pi);
    if (std::abs(modes - std::round(modes)) > 1e-8) {
        std::ostringstream os;
        os << "packet: carrier k L / 2 pi = " << modes << " is not an integer";
        throw ConfigError(os.str());
    }
    if (fast.n < slow.n) throw ConfigError("packet: fast grid must have at least as many points as the slow grid");
}

Field lift(const Field &slow, const Grid &fast, double eps, double shift_X)
{
    (void)eps;
    Grid scaled(fast.n, slow.grid.length);
    Field r = resample(slow, scaled, shift_X);
    return Field(fast, std::move(r.v));
}

Field envelope_dT(const Envelope &B)
{
    const Carrier &c = B.carrier;
    const double gam = c.k * c.k * c.omega;
    Field bxx = derivative(B.B, 2);
    Field out(B.grid());
    for (int j = 0; j < out.size(); ++j) {
        const cd b = B.B.v[j];
        out.v[j] = -0.5 * I * c.omega_double_prime * bxx.v[j] + 0.5 * I * gam * std::norm(b) * b;
    }
    return out;
}

namespace {

Jet lift_jet(const Jet &j, const Grid &fast, double eps, double shift)
{
    return j.map([&](const Field &f) { return lift(f, fast, eps, shift); });
}

// e^{i p phi} with its time derivatives, phi = k alpha + w t
Jet phase_jet(const Grid &fast, const Carrier &c, double t, int p)
{
    Field e = Field::from_function(fast, [&](double a) { return std::polar(1.0, p * (c.k * a + c.omega * t)); });
    const cd d = I * static_cast<double>(p) * c.omega;
    return Jet(e, d * e, d * d * e);
}

// (I - conj H0) with the zero mode counted twice, so that (I - conj H0) applied to the result doubles it
// on every mode including the mean, as on the line
Jet proj_minus_conj(const Jet &f)
{
    return f - conj_flat_hilbert(f) + f.map([](const Field &x) { return Field(x.grid, integral(x) / x.grid.length); });
}

void require_real(const Field &f, double tol, const char *what)
{
    const double m = f.max_imag();
    if (m > tol * std::max(1.0, f.max_abs())) {
        std::ostringstream os;
        os << "packet: " << what << " has imaginary part " << m;
        throw std::logic_error(os.str());
    }
}

}  // namespace

PacketState build_packet(const Envelope &env, double eps, double t, const Grid &fast)
{
    const Carrier &c = env.carrier;
    const Grid &slow = env.grid();
    validate_packet_grids(slow, fast, eps, c.k);
    const double k = c.k, w = c.omega, wp = c.omega_prime;
    const double gam = k * k * w;

    // slow jets of B(X(t), T(t)), dX/dt = eps w', dT/dt = eps^2
    const Field &B = env.B;
    Field Bx = derivative(B, 1);
    Field Bxx = derivative(B, 2);
    Field BT = envelope_dT(env);
    Field BxT = derivative(BT, 1);
    Field BxxT = derivative(BT, 2);
    Field BTT(slow);
    for (int j = 0; j < slow.n; ++j) {
        const cd b = B.v[j], bt = BT.v[j];
        const cd nl = 2.0 * (std::conj(b) * bt).real() * b + std::norm(b) * bt;
        BTT.v[j] = -0.5 * I * c.omega_double_prime * BxxT.v[j] + 0.5 * I * gam * nl;
    }
    const double e2 = eps * eps;
    Jet JB(B, eps * wp * Bx + e2 * BT, (e2 * wp * wp) * Bxx + (2.0 * e2 * eps * wp) * BxT + (e2 * e2) * BTT);
    Jet JBx = derivative(JB, 1);
    Jet JBxx = derivative(JBx, 1);
    Jet JBc = JB.conj();
    Jet JBxc = JBx.conj();
    Jet m2 = JB * JBc;

    Jet Z2 = (0.5 * I * k) * proj_minus_conj(m2);
    Jet Z3a = (-0.5 * k * k) * (JBc * m2);
    Jet Z3b = 0.5 * proj_minus_conj(JBc * JBx);
    Jet b2 = (-k * w) * m2;
    Jet b3a = (I * w * k * k) * (JB * m2);
    Jet s1 = JB * JBxc, s2 = JBc * JBx;
    Jet b3b = (0.75 * I * w) * (s1 - s2) - (0.25 * I * w) * conj_flat_hilbert(s1 + s2);
    Jet psi1 = (1.0 / (2.0 * w)) * JB;
    Jet psi2a = (-1.0 / (4.0 * I * k * w)) * JBx;
    Jet psi2b = (0.5 * w * I) * flat_hilbert(m2);
    Jet psi3 = (-3.0 / (16.0 * k * k * w)) * JBxx;

    const double shift = eps * wp * t;
    auto L = [&](const Jet &j) { return lift_jet(j, fast, eps, shift); };
    Jet E1 = phase_jet(fast, c, t, 1);
    Jet Em1 = phase_jet(fast, c, t, -1);

    Jet zeta1 = L(JB) * E1;
    Jet zeta2 = L(Z2);
    Jet zeta3 = L(Z3a) * Em1 + L(Z3b);
    Jet xi = eps * zeta1 + e2 * zeta2 + (e2 * eps) * zeta3;
    Jet b3e = L(b3a) * E1;
    Jet bj = e2 * L(b2) + (e2 * eps) * (b3e + b3e.conj() + L(b3b));
    auto cc = [](const Jet &j) { return j + j.conj(); };
    Jet psi = eps * cc(L(psi1) * E1) + e2 * (cc(L(psi2a) * E1) + L(psi2b)) + (e2 * eps) * cc(L(psi3) * E1);
    // gauge: the doubled zero mode lifts Im zeta by a conserved constant
    const double drift = e2 * 0.5 * k * (integral(m2.v[0]) / slow.length).real() +
                         e2 * eps * 0.5 * (integral((JBc * JBx).v[0]) / slow.length).imag();
    psi.v[0] = psi.v[0] - cd(drift * t);
    psi.v[1] = psi.v[1] - cd(drift);

    for (int i = 0; i < 3; ++i) {
        require_real(bj.v[i], 1e-10, "b");
        require_real(psi.v[i], 1e-10, "psi");
        bj.v[i] = bj.v[i].real();
        psi.v[i] = psi.v[i].real();
    }

    PacketState p;
    p.epsilon = eps;
    p.time = t;
    p.carrier = c;
    p.xi_jet = xi;
    p.b_jet = bj;
    p.zeta1_jet = zeta1;
    p.zeta2_jet = zeta2;
    p.xi_tilde = xi.v[0];
    p.zeta_tilde = Field::from_function(fast, [](double a) { return cd(a); }) + xi.v[0];
    p.b_tilde = bj.v[0];
    p.zeta1 = zeta1.v[0];
    p.zeta2 = zeta2.v[0];
    p.zeta3 = zeta3.v[0];
    p.B = L(JB).v[0];
    p.phase = E1.v[0];

    // D~_t zeta = xi_t + b (1 + xi_alpha)
    Field xa = derivative(xi.v[0], 1);
    p.dt_zeta = xi.v[1] + bj.v[0] * (xa + 1.0);
    p.dt2_zeta = packet_dt2(p, xi) + bj.v[1] + bj.v[0] * derivative(bj.v[0], 1);
    p.psi_tilde = psi.v[0];
    p.dt_psi = packet_dt(p, psi);
    p.lambda_tilde = psi.v[0] - approx_hilbert(eps, p.zeta1, p.zeta2, psi.v[0]);
    return p;
}

Field packet_dt(const PacketState &p, const Jet &f)
{
    return f.v[1] + p.b_tilde * derivative(f.v[0], 1);
}

Field packet_dt2(const PacketState &p, const Jet &f)
{
    const Field &b = p.b_tilde;
    Field fa = derivative(f.v[0], 1);
    Field faa = derivative(fa, 1);
    Field fat = derivative(f.v[1], 1);
    Field ba = derivative(b, 1);
    return f.v[2] + p.b_jet.v[1] * fa + 2.0 * (b * fat) + b * ba * fa + b * b * faa;
}

std::pair<Field, Field> build_zeta(const Envelope &B, double eps, double t, const Grid &fast)
{
    PacketState p = build_packet(B, eps, t, fast);
    return {p.zeta_tilde, p.xi_tilde};
}

std::pair<Field, Field> build_time_derivatives(const Envelope &B, double eps, double t, const Grid &fast)
{
    PacketState p = build_packet(B, eps, t, fast);
    return {p.dt_zeta, p.dt2_zeta};
}

Field build_b_tilde(const Envelope &B, double eps, double t, const Grid &fast)
{
    return build_packet(B, eps, t, fast).b_tilde;
}

std::pair<Field, Field> build_psi_lambda(const Envelope &B, double eps, double t, const Grid &fast)
{
    PacketState p = build_packet(B, eps, t, fast);
    return {p.psi_tilde, p.lambda_tilde};
}

void write_packet_csv(const PacketState &p, const std::string &path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "alpha,re_zeta,im_zeta,re_dt_zeta,im_dt_zeta,re_dt2_zeta,im_dt2_zeta,b,psi,re_lambda,im_lambda\n";
    out << std::setprecision(17);
    const Grid &g = p.grid();
    for (int j = 0; j < g.n; ++j) {
        out << g.node(j) << ',' << p.zeta_tilde.v[j].real() << ',' << p.zeta_tilde.v[j].imag() << ','
            << p.dt_zeta.v[j].real() << ',' << p.dt_zeta.v[j].imag() << ',' << p.dt2_zeta.v[j].real() << ','
            << p.dt2_zeta.v[j].imag() << ',' << p.b_tilde.v[j].real() << ',' << p.psi_tilde.v[j].real() << ','
            << p.lambda_tilde.v[j].real() << ',' << p.lambda_tilde.v[j].imag() << '\n';
    }
}

}  // namespace wwp
