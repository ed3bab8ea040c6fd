#include "wwp/nls.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wwp {

Carrier dispersion(double k)
{
    if (!(k > 0.0)) throw std::domain_error("dispersion: carrier wavenumber must be positive");
    Carrier c;
    c.k = k;
    c.omega = std::sqrt(k);
    c.omega_prime = 0.5 / std::sqrt(k);
    c.omega_double_prime = -0.25 / std::pow(k, 1.5);
    return c;
}

namespace {

Field linear_flow(const Field &B, const Carrier &c, double dT)
{
    const Grid &g = B.grid;
    cvec coef = fft(B);
    for (int j = 0; j < g.n; ++j) {
        const double xi = g.wavenumber(j);
        coef[j] *= std::polar(1.0, 0.5 * c.omega_double_prime * xi * xi * dT);
    }
    return ifft(g, coef);
}

}  // namespace

Envelope nls_step(const Envelope &B, double dT)
{
    const Carrier &c = B.carrier;
    const double gam = c.k * c.k * c.omega;
    Envelope out{linear_flow(B.B, c, 0.5 * dT), B.T + dT, c};
    for (auto &x : out.B.v) x *= std::polar(1.0, 0.5 * gam * std::norm(x) * dT);
    out.B = linear_flow(out.B, c, 0.5 * dT);
    if (!out.B.finite()) {
        std::ostringstream os;
        os << "nls_step: non-finite envelope at T = " << out.T;
        throw std::runtime_error(os.str());
    }
    return out;
}

Envelope nls_steps(const Envelope &B, long n, double dT)
{
    if (n <= 0) return B;
    const Carrier &c = B.carrier;
    const Grid &g = B.grid();
    const double gam = c.k * c.k * c.omega;
    cvec half(g.n), full(g.n);
    for (int j = 0; j < g.n; ++j) {
        const double xi = g.wavenumber(j);
        half[j] = std::polar(1.0, 0.25 * c.omega_double_prime * xi * xi * dT);
        full[j] = std::polar(1.0, 0.5 * c.omega_double_prime * xi * xi * dT);
    }
    cvec coef = fft(B.B);
    for (int j = 0; j < g.n; ++j) coef[j] *= half[j];
    for (long i = 0; i < n; ++i) {
        Field x = ifft(g, coef);
        for (auto &z : x.v) z *= std::polar(1.0, 0.5 * gam * std::norm(z) * dT);
        coef = fft(x);
        const cvec &m = i + 1 < n ? full : half;
        for (int j = 0; j < g.n; ++j) coef[j] *= m[j];
    }
    Envelope out{ifft(g, coef), B.T + n * dT, c};
    if (!out.B.finite()) {
        std::ostringstream os;
        os << "nls_steps: non-finite envelope at T = " << out.T;
        throw std::runtime_error(os.str());
    }
    return out;
}

double default_dT(const Grid &g, const Carrier &c)
{
    const double h = g.h();
    return std::min(1e-3, h * h / std::abs(c.omega_double_prime) / 10.0);
}

double mass(const Envelope &B)
{
    double s = 0.0;
    for (auto &x : B.B.v) s += std::norm(x);
    return s * B.grid().h();
}

double hamiltonian(const Envelope &B)
{
    const Carrier &c = B.carrier;
    Field bx = derivative(B.B, 1);
    double s = 0.0;
    for (int j = 0; j < bx.size(); ++j) {
        const double m = std::norm(B.B.v[j]);
        s += -c.omega_double_prime * std::norm(bx.v[j]) / 2.0 - c.k * c.k * c.omega * m * m / 4.0;
    }
    return s * B.grid().h();
}

Field nls_residual(const Envelope &B, const Field &B_T)
{
    const Carrier &c = B.carrier;
    Field bxx = derivative(B.B, 2);
    Field r(B.grid());
    for (int j = 0; j < r.size(); ++j) {
        const cd b = B.B.v[j];
        r.v[j] = 2.0 * I * B_T.v[j] - c.omega_double_prime * bxx.v[j] + c.k * c.k * c.omega * b * std::norm(b);
    }
    return r;
}

SolitonParams soliton_params(double eta, const Carrier &c)
{
    const double a = -c.omega_double_prime;
    const double cc = c.k * c.k * c.omega;
    SolitonParams p;
    p.eta = eta;
    p.beta = eta * std::sqrt(cc / (2.0 * a));
    p.sigma = cc * eta * eta / 4.0;
    return p;
}

Envelope soliton_at(double eta, const Carrier &c, const Grid &g, double T)
{
    SolitonParams p = soliton_params(eta, c);
    const double tail = eta / std::cosh(p.beta * g.length / 2.0);
    if (tail > 1e-13) {
        std::ostringstream os;
        os << "soliton: tail " << tail << " exceeds 1e-13; enlarge the slow domain";
        throw ConfigError(os.str());
    }
    const double X0 = g.length / 2.0;
    const cd rot = std::polar(1.0, p.sigma * T);
    Field B = Field::from_function(g, [&](double X) { return eta / std::cosh(p.beta * (X - X0)) * rot; });
    return {B, T, c};
}

Envelope soliton(double eta, const Carrier &c, const Grid &g) { return soliton_at(eta, c, g, 0.0); }

Envelope gaussian_envelope(double eta, double width, const Carrier &c, const Grid &g)
{
    const double X0 = g.length / 2.0;
    const double d = g.length / 2.0 / width;
    if (eta * std::exp(-0.5 * d * d) > 1e-13) throw ConfigError("gaussian envelope: tails exceed 1e-13");
    Field B = Field::from_function(g, [&](double X) {
        const double y = (X - X0) / width;
        return cd(eta * std::exp(-0.5 * y * y));
    });
    return {B, 0.0, c};
}

SolitonSource::SolitonSource(double eta, const Carrier &c, const Grid &g) : eta_(eta), carrier_(c), grid_(g)
{
    soliton(eta, c, g);
}

Envelope SolitonSource::at(double T) { return soliton_at(eta_, carrier_, grid_, T); }

NlsTrajectory::NlsTrajectory(Envelope B0, double dT, int cache_stride)
    : B0_(std::move(B0)), dT_(dT), stride_(cache_stride), last_(B0_)
{
    if (!(dT > 0.0)) throw ConfigError("nls: dT must be positive");
    cache_.emplace(0, B0_);
    series_.push_back({B0_.T, mass(B0_), hamiltonian(B0_)});
}

void NlsTrajectory::advance_to(double T_final)
{
    const long target = static_cast<long>(std::floor((T_final - B0_.T) / dT_ + 1e-9));
    while (last_step_ < target) {
        const long next = std::min(target, (last_step_ / stride_ + 1) * stride_);
        last_ = nls_steps(last_, next - last_step_, dT_);
        last_step_ = next;
        last_.T = B0_.T + last_step_ * dT_;
        if (last_step_ % stride_ == 0) {
            cache_.emplace(last_step_, last_);
            series_.push_back({last_.T, mass(last_), hamiltonian(last_)});
        }
    }
}

Envelope NlsTrajectory::at(double T)
{
    const double rel = T - B0_.T;
    if (rel <= 0.0) {
        Envelope e = B0_;
        if (rel < 0.0) {
            const long n = static_cast<long>(std::floor(-rel / dT_));
            for (long i = 0; i < n; ++i) e = nls_step(e, -dT_);
            const double rest = rel + n * dT_;
            if (rest != 0.0) e = nls_step(e, rest);
        }
        e.T = T;
        return e;
    }
    const long n = static_cast<long>(std::floor(rel / dT_ + 1e-9));
    advance_to(B0_.T + n * dT_);
    Envelope e;
    long from;
    if (n == last_step_) {
        e = last_;
        from = n;
    } else {
        auto it = cache_.upper_bound(n);
        --it;
        from = it->first;
        e = it->second;
    }
    e = nls_steps(e, n - from, dT_);
    const double rest = rel - n * dT_;
    if (std::abs(rest) > 1e-15) e = nls_step(e, rest);
    e.T = T;
    return e;
}

Envelope nls_solve(const Envelope &B0, double T_final, double dT)
{
    NlsTrajectory tr(B0, dT);
    return tr.at(B0.T + T_final);
}

void write_envelope_csv(const Envelope &B, const std::string &path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "X,re_B,im_B\n" << std::setprecision(17);
    for (int j = 0; j < B.B.size(); ++j)
        out << B.grid().node(j) << ',' << B.B.v[j].real() << ',' << B.B.v[j].imag() << '\n';
}

}  // namespace wwp
