#include "wwp/quantities.hpp"

#include <cmath>
#include <sstream>

#include "wwp/residual.hpp"

namespace wwp {

namespace {

const cd inv_pi_i = 1.0 / (pi * I);

}  // namespace

Field compute_b(const CurveKernel &k, const Field &u)
{
    Field rhs = -commutator(k, u, k.curve().xi.conj());
    return solve_real_part(k, rhs).f;
}

AResult compute_A(const CurveKernel &k, const Field &u, double tol, int max_iter)
{
    const Curve &c = k.curve();
    const int n = k.n();
    const double h = k.grid().h();
    Field xbp = derivative(c.xi.conj(), 1);
    Field R0 = 1.0 + I * commutator(k, u, u.conj());

    // real linear map A -> Re H A + Re( i [w(A), H](conj(xi)_alpha / zeta_alpha) ), w(A) = i A zeta_alpha - i
    rvec M = k.double_layer();
    rvec d(n);
    for (int j = 0; j < n; ++j) {
        const cd *p = k.row(j);
        double *mr = M.data() + static_cast<size_t>(j) * n;
        cd S = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            const cd t = p[i] * xbp.v[i];
            S += t;
            mr[i] += h / pi * (c.gamma_prime.v[i] * t).imag();
        }
        mr[j] -= h / pi * (c.gamma_prime.v[j] * S + c.gamma_second.v[j] * xbp.v[j] / c.gamma_prime.v[j]).imag();
        d[j] = -h / pi * xbp.v[j].imag();
    }

    rvec A(n, 1.0), An(n);
    rvec r(n);
    for (int j = 0; j < n; ++j) r[j] = R0.v[j].real();
    AResult out;
    double change = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Field Af(k.grid());
        for (int j = 0; j < n; ++j) Af.v[j] = A[j];
        Field Ap = derivative(Af, 1);
        double d2 = 0.0, a2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double *mr = M.data() + static_cast<size_t>(j) * n;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += mr[i] * A[i];
            An[j] = r[j] + acc + d[j] * Ap.v[j].real();
            d2 += (An[j] - A[j]) * (An[j] - A[j]);
            a2 += An[j] * An[j];
        }
        A.swap(An);
        change = std::sqrt(d2 * h);
        out.iterations = it;
        if (change <= tol * std::max(1.0, std::sqrt(a2 * h))) {
            out.A = Field(k.grid());
            for (int j = 0; j < n; ++j) out.A.v[j] = A[j];
            double amin = 1e300;
            for (double x : A) amin = std::min(amin, x);
            if (amin < 0.5) {
                std::ostringstream os;
                os << "compute_A: A dropped to " << amin << " (< 1/2)";
                throw RegimeError(os.str());
            }
            out.w = I * out.A * c.gamma_prime - I;
            return out;
        }
        if (!std::isfinite(change)) break;
    }
    std::ostringstream os;
    os << "compute_A: fixed point did not converge (last change " << change << ")";
    throw RegimeError(os.str());
}

Field compute_A_given_w(const CurveKernel &k, const Field &u, const Field &w)
{
    const Field xb = k.curve().xi.conj();
    Field rhs = 1.0 + I * commutator(k, w, xb) + I * commutator(k, u, u.conj());
    return solve_real_part(k, rhs).f;
}

Field compute_G(const CurveKernel &k, const Field &u)
{
    const Curve &c = k.curve();
    Field zmz = c.xi - c.xi.conj();
    Field br = commutator(k, u, u) + commutator(k, u, u, true);
    return -2.0 * br + inv_pi_i * s2_apply(k, {u, u}, zmz);
}

Field compute_DtG(const CurveKernel &k, const Field &u, const Field &w)
{
    const Curve &c = k.curve();
    Field imz = c.xi.imag();
    Field imu = u.imag();
    Field t1 = commutator(k, w, u) + commutator(k, w, u, true);
    Field t2 = commutator(k, u, w) + commutator(k, u, w, true);
    Field out = -2.0 * t1 - 2.0 * t2;
    out += (2.0 * inv_pi_i) * s2_apply(k, {u, u}, u);
    out -= (2.0 * inv_pi_i) * s2_apply(k, {u, u.conj()}, u, true);
    out += (4.0 / pi) * s2_apply(k, {u, w}, imz);
    out += (2.0 / pi) * s2_apply(k, {u, u}, imu);
    out -= (4.0 / pi) * s2_apply(k, {u, u, u}, imz);
    return out;
}

Field compute_at_over_a(const CurveKernel &k, const Field &u, const Field &w, const Field &A)
{
    const Curve &c = k.curve();
    Field ub = u.conj();
    Field R = 2.0 * I * commutator(k, w, ub) + 2.0 * I * commutator(k, u, w.conj()) -
              (1.0 / pi) * s2_apply(k, {u, u}, ub);
    // (I - H)(Y q) = R with q = A conj(zeta_alpha), Y real
    Field qm1 = A * c.gamma_prime.conj() - 1.0;
    const int n = k.n();
    const double h = k.grid().h();
    const rvec &K = k.double_layer();
    Field Y = R.real();
    for (int it = 1; it <= 100; ++it) {
        Field F = Y * qm1;
        Field rr = R - (F - curve_hilbert(k, F));
        Field Yn(k.grid());
        double d2 = 0.0, y2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double *kr = K.data() + static_cast<size_t>(j) * n;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += kr[i] * Y.v[i].real();
            Yn.v[j] = rr.v[j].real() + acc;
            d2 += std::norm(Yn.v[j] - Y.v[j]);
            y2 += std::norm(Yn.v[j]);
        }
        Y = Yn;
        if (std::sqrt(d2 * h) <= 1e-12 * std::max(1.0, std::sqrt(y2 * h))) return Y;
    }
    throw RegimeError("compute_at_over_a: fixed point did not converge");
}

Field compute_Dtb(const CurveKernel &k, const Field &u, const Field &w, const Field &b)
{
    const Field xb = k.curve().xi.conj();
    Field R = commutator(k, u, 2.0 * b - u.conj()) - commutator(k, w, xb) + inv_pi_i * s2_apply(k, {u, u}, xb);
    return solve_real_part(k, R).f;
}

CurveState make_state(const CurveKernel &k, const Field &u, double t)
{
    CurveState s;
    s.curve = k.curve();
    s.u = u;
    s.time = t;
    s.b = compute_b(k, u);
    AResult a = compute_A(k, u);
    s.A = a.A;
    s.w = a.w;
    return s;
}

CurveState make_state(const Field &xi, const Field &u, double t)
{
    CurveKernel k(Curve::from_xi(xi));
    return make_state(k, u, t);
}

Field compute_b(const CurveState &s) { return compute_b(CurveKernel(s.curve), s.u); }
Field compute_A(const CurveState &s) { return compute_A(CurveKernel(s.curve), s.u).A; }
Field compute_G(const CurveState &s) { return compute_G(CurveKernel(s.curve), s.u); }
Field compute_DtG(const CurveState &s) { return compute_DtG(CurveKernel(s.curve), s.u, s.w); }
Field compute_at_over_a(const CurveState &s) { return compute_at_over_a(CurveKernel(s.curve), s.u, s.w, s.A); }
Field compute_Dtb(const CurveState &s) { return compute_Dtb(CurveKernel(s.curve), s.u, s.w, s.b); }

double coherence(const CurveKernel &k, const Field &u) { return l2_norm(u - conj_curve_hilbert(k, u)); }

cd holomorphic_form(const Field &f)
{
    Field fa = derivative(f, 1);
    cd s = 0.0;
    for (int j = 0; j < f.size(); ++j) s += f.v[j] * std::conj(fa.v[j]);
    return I * s * f.grid.h();
}

namespace {

double weighted_l2(const Field &f, const Field &A)
{
    double s = 0.0;
    for (int j = 0; j < f.size(); ++j) s += std::norm(f.v[j]) / A.v[j].real();
    return s * f.grid.h();
}

// D_t d^n f from D_t f: D_t d f = d D_t f - b_alpha d f
std::vector<Field> dt_derivatives(const Field &f, const Field &dtf, const Field &b, int s)
{
    Field ba = derivative(b, 1);
    std::vector<Field> out{dtf};
    Field fn = f;
    for (int n = 1; n <= s; ++n) {
        fn = derivative(fn, 1);
        out.push_back(derivative(out.back(), 1) - ba * fn);
    }
    return out;
}

}  // namespace

RemainderDiagnostics remainder_diagnostics(const CurveState &st, const CurveKernel &k, const PacketState &p, int s)
{
    check_same_grid(st.curve.xi, p.xi_tilde, "remainder_diagnostics");
    RemainderDiagnostics d;
    const Field &u = st.u;
    const Field &b = st.b;
    Field r = st.curve.xi - p.xi_tilde;
    Field zta = derivative(p.xi_tilde, 1) + 1.0;
    Field dtr = u - p.dt_zeta - (b - p.b_tilde) * zta;
    d.err_zeta_alpha = sobolev_norm(derivative(r, 1), s);
    d.err_u = sobolev_norm(u - p.dt_zeta, s);
    const double es = sobolev_norm(derivative(r, 1), s) + sobolev_norm(dtr, s);
    d.E_s = es * es;

    auto IH = [&](const Field &f) { return f - curve_hilbert(k, f); };
    Field rho = 0.5 * IH(r);
    Field dtrho = 0.5 * IH(dtr) - 0.5 * commutator(k, u, r);
    d.rho_norm = sobolev_norm(rho, s);

    // sigma = 1/4 (I - H)(D_t (I - H) xi - D~_t (I - H~) xi~)
    const Field &xi = st.curve.xi;
    Jet lam = p.xi_jet - approx_hilbert(p.epsilon, p.zeta1_jet, p.zeta2_jet, p.xi_jet);
    Field S2 = packet_dt(p, lam);
    Field S1 = IH(u - b) - commutator(k, u, xi);
    Field S = S1 - S2;
    Field sigma = 0.25 * IH(S);
    Field G = compute_G(k, u);
    Field dtS = G + I * st.A * derivative(IH(xi), 1) - (packet_dt2(p, lam) + (b - p.b_tilde) * derivative(S2, 1));
    Field dtsigma = 0.25 * IH(dtS) - 0.25 * commutator(k, u, S);
    d.sigma_norm = sobolev_norm(sigma, s);

    auto rho_dt = dt_derivatives(rho, dtrho, b, s);
    auto sig_dt = dt_derivatives(sigma, dtsigma, b, s);
    d.holo_form_min = 1e300;
    Field rn = rho, sn = sigma;
    for (int n = 0; n <= s; ++n) {
        if (n > 0) {
            rn = derivative(rn, 1);
            sn = derivative(sn, 1);
        }
        Field phi = 0.5 * IH(rn);
        const double hf = holomorphic_form(phi).real();
        d.holo_form_min = std::min(d.holo_form_min, hf);
        const double En = weighted_l2(rho_dt[n], st.A) + hf;
        const double Fn = weighted_l2(sig_dt[n], st.A) + holomorphic_form(sn).real();
        d.energy_E.push_back(En);
        d.energy_F.push_back(Fn);
        d.energy_total += En + Fn;
    }
    return d;
}

RemainderDiagnostics remainder_diagnostics(const CurveState &st, const PacketState &p, int s)
{
    return remainder_diagnostics(st, CurveKernel(st.curve), p, s);
}

}  // namespace wwp
