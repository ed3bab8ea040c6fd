#include "wwp/evolve.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wwp {

namespace {

constexpr double kRatioFloor = 1e-8;

}  // namespace

void validate(const SolverConfig &cfg, const Grid &g)
{
    if (!(cfg.dt > 0.0)) throw ConfigError("solver: dt must be positive");
    if (!(cfg.filter_floor >= 0.0 && cfg.filter_floor <= 1e-8)) throw ConfigError("solver: filter_floor must lie in [0, 1e-8]");
    if (cfg.rk_order != 4) throw ConfigError("solver: only rk_order = 4 is implemented");
    if (!(cfg.coherence_tol > 0.0)) throw ConfigError("solver: coherence_tol must be positive");
    if (cfg.checkpoint_every < 0) throw ConfigError("solver: checkpoint_every must be nonnegative");
    if (!(cfg.max_chord_arc_ratio > 1.0)) throw ConfigError("solver: max_chord_arc_ratio must exceed 1");
    if (cfg.error_every < 1) throw ConfigError("solver: error_every must be positive");
    if (cfg.sobolev_index < 0) throw ConfigError("solver: sobolev_index must be nonnegative");
    if (cfg.dt > cfg.cfl * std::sqrt(g.h())) {
        std::ostringstream os;
        os << "solver: dt " << cfg.dt << " exceeds cfl*sqrt(h) = " << cfg.cfl * std::sqrt(g.h());
        throw ConfigError(os.str());
    }
}

Rates rhs(const CurveState &s, double floor)
{
    const Field &xi = s.curve.xi;
    Field za = derivative(xi, 1) + 1.0;
    Rates r;
    r.xi = krasny_filter(s.u - s.b * za, floor);
    r.u = krasny_filter(I * s.A * za - I - s.b * derivative(s.u, 1), floor);
    if (s.psi) {
        Field up(s.grid());
        for (int j = 0; j < up.size(); ++j) up.v[j] = 0.5 * std::norm(s.u.v[j]);
        r.psi = krasny_filter(up - xi.imag() - s.b * derivative(*s.psi, 1), floor).real();
    }
    return r;
}

Field antiholomorphic_part(const CurveKernel &k, const Field &f)
{
    const Field &zb = k.curve().gamma_prime;
    cd c = 0.0;
    for (int j = 0; j < f.size(); ++j) c += f.v[j] * std::conj(zb.v[j]);
    c *= k.grid().h() / k.grid().length;
    return 0.5 * (f + conj_curve_hilbert(k, f)) + 0.5 * c;
}

double constraint_defect(const CurveKernel &k, const Field &f) { return 2.0 * l2_norm(f - antiholomorphic_part(k, f)); }

namespace {

struct Stage {
    Field xi, u;
    std::optional<Field> psi;
};

Stage axpy(const CurveState &s, const Rates &r, double a)
{
    Stage out{s.curve.xi + a * r.xi, s.u + a * r.u, std::nullopt};
    if (s.psi) out.psi = *s.psi + a * *r.psi;
    return out;
}

CurveState make(const Stage &st, double t)
{
    CurveKernel k(Curve::from_xi(st.xi));
    CurveState s = make_state(k, st.u, t);
    s.psi = st.psi;
    return s;
}

}  // namespace

CurveState step(const CurveState &s, const SolverConfig &cfg, StepInfo *info)
{
    const double dt = cfg.dt;
    const double fl = cfg.filter_floor;
    Rates k1 = rhs(s, fl);
    CurveState s2 = make(axpy(s, k1, 0.5 * dt), s.time + 0.5 * dt);
    Rates k2 = rhs(s2, fl);
    CurveState s3 = make(axpy(s, k2, 0.5 * dt), s.time + 0.5 * dt);
    Rates k3 = rhs(s3, fl);
    CurveState s4 = make(axpy(s, k3, dt), s.time + dt);
    Rates k4 = rhs(s4, fl);

    const double w = dt / 6.0;
    Field xi = krasny_filter(s.curve.xi + w * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi), fl);
    Field u = krasny_filter(s.u + w * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u), fl);
    std::optional<Field> psi;
    if (s.psi) psi = krasny_filter(*s.psi + w * (*k1.psi + 2.0 * *k2.psi + 2.0 * *k3.psi + *k4.psi), fl).real();

    if (cfg.project) {
        CurveKernel k0(Curve::from_xi(xi));
        Field px = antiholomorphic_part(k0, xi);
        if (info) info->xi_drift = 2.0 * l2_norm(xi - px);
        xi = px;
    }
    CurveKernel k(Curve::from_xi(xi));
    if (cfg.project) {
        Field pu = antiholomorphic_part(k, u);
        if (info) info->u_drift = 2.0 * l2_norm(u - pu);
        u = pu;
    } else if (info) {
        info->xi_drift = constraint_defect(k, xi);
        info->u_drift = constraint_defect(k, u);
    }
    CurveState out = make_state(k, u, s.time + dt);
    out.psi = psi;
    return out;
}

const char *to_string(Termination t)
{
    switch (t) {
    case Termination::completed: return "completed";
    case Termination::chord_arc_violation: return "chord_arc_violation";
    case Termination::coherence_loss: return "coherence_loss";
    case Termination::nan: return "nan";
    case Termination::regime: return "regime";
    }
    return "unknown";
}

std::vector<double> RunReport::times() const
{
    std::vector<double> t;
    for (const auto &r : rows) t.push_back(r.t);
    return t;
}

std::vector<double> RunReport::error_norms() const
{
    std::vector<double> e;
    for (const auto &r : rows) e.push_back(r.err_zeta_alpha + r.err_u);
    return e;
}

namespace {

bool state_finite(const CurveState &s)
{
    return s.curve.xi.finite() && s.u.finite() && s.b.finite() && s.A.finite() && (!s.psi || s.psi->finite());
}

}  // namespace

RunReport run(CurveState &s, const SolverConfig &cfg0, double T_final, const PacketProvider &packet, bool eulerian)
{
    validate(cfg0, s.grid());
    SolverConfig cfg = cfg0;
    RunReport rep;
    const double span = T_final - s.time;
    if (span < -1e-12) throw ConfigError("run: T_final precedes the state time");
    const long nsteps = span > 1e-12 ? static_cast<long>(std::ceil(span / cfg0.dt - 1e-9)) : 0;
    if (nsteps > 0) cfg.dt = span / static_cast<double>(nsteps);

    double last_drift = 0.0;
    auto record = [&]() {
        CurveKernel k(s.curve);
        PacketState p = packet(s.time);
        RemainderDiagnostics d = remainder_diagnostics(s, k, p, cfg.sobolev_index);
        ReportRow row;
        row.t = s.time;
        row.err_zeta_alpha = d.err_zeta_alpha;
        row.err_u = d.err_u;
        row.E_s = d.E_s;
        row.energy_total = d.energy_total;
        row.coherence = rep.steps == 0 ? constraint_defect(k, s.u) : last_drift;
        row.chord_arc_min = chord_arc(s.curve, 4).nu;
        row.mean_im_zeta = mean(s.curve.xi.imag());
        if (eulerian) {
            row.eulerian_err = eulerian_error(s, p, cfg.sobolev_index);
            rep.max_eulerian_error = std::max(rep.max_eulerian_error, row.eulerian_err);
        }
        rep.max_error = std::max(rep.max_error, row.err_zeta_alpha + row.err_u);
        rep.rows.push_back(row);
    };

    record();
    for (long n = 1; n <= nsteps; ++n) {
        StepInfo info;
        try {
            s = step(s, cfg, &info);
        } catch (const ChordArcError &e) {
            rep.termination = Termination::chord_arc_violation;
            rep.message = e.what();
            break;
        } catch (const RegimeError &e) {
            rep.termination = Termination::regime;
            rep.message = e.what();
            break;
        }
        rep.steps = n;
        if (!state_finite(s)) {
            rep.termination = Termination::nan;
            rep.message = "non-finite state";
            break;
        }
        last_drift = info.u_drift;
        rep.max_coherence = std::max({rep.max_coherence, info.u_drift, info.xi_drift});
        if (std::max(info.u_drift, info.xi_drift) > cfg.coherence_tol) {
            rep.termination = Termination::coherence_loss;
            std::ostringstream os;
            os << "holomorphy defect " << std::max(info.u_drift, info.xi_drift) << " at t = " << s.time;
            rep.message = os.str();
            break;
        }
        ChordArc ca = chord_arc(s.curve, 4);
        if (!(ca.nu > 0.0) || ca.upper / ca.nu > cfg.max_chord_arc_ratio) {
            rep.termination = Termination::chord_arc_violation;
            std::ostringstream os;
            os << "chord-arc ratio " << ca.upper / ca.nu << " at t = " << s.time;
            rep.message = os.str();
            break;
        }
        if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() && n % cfg.checkpoint_every == 0)
            write_checkpoint(s, cfg.checkpoint_path);
        if (n % cfg.error_every == 0 || n == nsteps) record();
    }
    rep.final_time = s.time;
    return rep;
}

void write_report_csv(const RunReport &r, const std::string &path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "t,err_zeta_alpha,err_u,E_s,energy_total,coherence,chord_arc_min,mean_im_zeta,eulerian_err\n";
    out << std::setprecision(12);
    for (const auto &row : r.rows)
        out << row.t << ',' << row.err_zeta_alpha << ',' << row.err_u << ',' << row.E_s << ',' << row.energy_total << ','
            << row.coherence << ',' << row.chord_arc_min << ',' << row.mean_im_zeta << ',' << row.eulerian_err << '\n';
}

AdmissibleData admissible_data(const PacketState &p0, double tol, int max_iter, int s)
{
    const Field &xt = p0.xi_tilde;
    const Grid &g = xt.grid;
    AdmissibleData out;
    Field gn = antiholomorphic_part(CurveKernel(Curve::flat(g)), xt);
    double prev = -1.0;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        CurveKernel k(Curve::from_xi(gn));
        Field next = antiholomorphic_part(k, xt);
        Field d = next - gn;
        const double inc = sobolev_norm(d, s);
        out.increments.push_back(inc);
        // ratios are taken only above the discretization floor, where the near-Nyquist modes stall
        if (prev > kRatioFloor * std::max(1.0, sobolev_norm(next, s))) {
            const double ratio = inc / prev;
            out.contraction_ratio = std::max(out.contraction_ratio, ratio);
            if (ratio >= 1.0) {
                std::ostringstream os;
                os << "admissible_data: iteration is not contracting (ratio " << ratio << ")";
                throw RegimeError(os.str());
            }
        }
        prev = inc;
        gn = next;
        out.iterations = it;
        if (l2_norm(d) <= tol * std::max(1.0, l2_norm(next))) {
            converged = true;
            break;
        }
    }
    if (!converged) throw RegimeError("admissible_data: iteration did not converge");
    CurveKernel k(Curve::from_xi(gn));
    Field v0 = antiholomorphic_part(k, p0.dt_zeta);
    out.state = make_state(k, v0, p0.time);
    return out;
}

EulerianProfile eulerian_profile(const CurveState &s, double tol)
{
    const Grid &g = s.grid();
    const Field &xi = s.curve.xi;
    Field rx = xi.real();
    Field xa = derivative(rx, 1);
    for (int j = 0; j < g.n; ++j)
        if (1.0 + xa.v[j].real() <= 0.0) throw RegimeError("eulerian_profile: x(alpha) is not monotone");
    cvec crx = fft(rx), cxi = fft(xi), cu = fft(s.u);
    EulerianProfile e;
    e.x.resize(g.n);
    e.alpha.resize(g.n);
    e.eta.resize(g.n);
    e.velocity.resize(g.n);
    for (int j = 0; j < g.n; ++j) {
        const double x = g.node(j);
        double a = x - rx.v[j].real();
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            const double f = a + interpolate(crx, g, a).real() - x;
            const double fp = 1.0 + interpolate_derivative(crx, g, a).real();
            if (!(fp > 0.0)) throw RegimeError("eulerian_profile: x(alpha) is not monotone");
            const double da = f / fp;
            a -= da;
            if (std::abs(da) <= tol * std::max(1.0, std::abs(a))) {
                ok = true;
                break;
            }
        }
        if (!ok) throw RegimeError("eulerian_profile: Newton inversion did not converge");
        e.x[j] = x;
        e.alpha[j] = a;
        e.eta[j] = interpolate(cxi, g, a).imag();
        e.velocity[j] = interpolate(cu, g, a);
    }
    return e;
}

double eulerian_error(const CurveState &s, const PacketState &p, int sobolev_index)
{
    check_same_grid(s.curve.xi, p.zeta1, "eulerian_error");
    EulerianProfile e = eulerian_profile(s);
    Field eta(s.grid());
    for (int j = 0; j < eta.size(); ++j) eta.v[j] = e.eta[j];
    const double ek = p.epsilon * p.carrier.k;
    return sobolev_norm(derivative(eta, 1) - ek * p.zeta1.real(), sobolev_index);
}

namespace {

constexpr char kMagic[8] = {'W', 'W', 'P', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream &o, std::uint64_t x)
{
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    o.write(reinterpret_cast<const char *>(b), 8);
}

void put_u32(std::ostream &o, std::uint32_t x)
{
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(x >> (8 * i));
    o.write(reinterpret_cast<const char *>(b), 4);
}

void put_f64(std::ostream &o, double x) { put_u64(o, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(std::istream &in)
{
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char *>(b), 8)) throw std::runtime_error("checkpoint: truncated file");
    std::uint64_t x = 0;
    for (int i = 7; i >= 0; --i) x = (x << 8) | b[i];
    return x;
}

std::uint32_t get_u32(std::istream &in)
{
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char *>(b), 4)) throw std::runtime_error("checkpoint: truncated file");
    std::uint32_t x = 0;
    for (int i = 3; i >= 0; --i) x = (x << 8) | b[i];
    return x;
}

double get_f64(std::istream &in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_checkpoint(const CurveState &s, const std::string &path)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream o(tmp, std::ios::binary);
        if (!o) throw std::runtime_error("cannot open " + tmp);
        o.write(kMagic, 8);
        put_u32(o, kVersion);
        put_u32(o, s.psi ? 1u : 0u);
        put_u64(o, static_cast<std::uint64_t>(s.grid().n));
        put_f64(o, s.grid().length);
        put_f64(o, s.time);
        for (const cd &z : s.curve.xi.v) {
            put_f64(o, z.real());
            put_f64(o, z.imag());
        }
        for (const cd &z : s.u.v) {
            put_f64(o, z.real());
            put_f64(o, z.imag());
        }
        if (s.psi)
            for (const cd &z : s.psi->v) put_f64(o, z.real());
        if (!o) throw std::runtime_error("checkpoint: write failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("checkpoint: rename failed");
}

CurveState read_checkpoint(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("checkpoint: bad magic");
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version");
    const std::uint32_t flags = get_u32(in);
    const std::uint64_t n = get_u64(in);
    const double L = get_f64(in);
    const double t = get_f64(in);
    if (n == 0 || n > (1u << 24)) throw std::runtime_error("checkpoint: bad size");
    Grid g(static_cast<int>(n), L);
    Field xi(g), u(g);
    for (auto &z : xi.v) {
        const double re = get_f64(in);
        z = cd(re, get_f64(in));
    }
    for (auto &z : u.v) {
        const double re = get_f64(in);
        z = cd(re, get_f64(in));
    }
    CurveState s = make_state(xi, u, t);
    if (flags & 1u) {
        Field psi(g);
        for (auto &z : psi.v) z = get_f64(in);
        s.psi = psi;
    }
    return s;
}

}  // namespace wwp
