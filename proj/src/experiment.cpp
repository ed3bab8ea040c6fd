#include "wwp/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace wwp {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x)
{
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string &key, const std::string &v)
{
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty() && std::isfinite(x)) return x;
    } catch (const std::exception &) {
    }
    throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
}

long to_long(const std::string &key, const std::string &v)
{
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (trim(v.substr(pos)).empty()) return x;
    } catch (const std::exception &) {
    }
    throw ConfigError("config: " + key + " expects an integer, got '" + v + "'");
}

bool to_bool(const std::string &key, const std::string &v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: " + key + " expects true/false, got '" + v + "'");
}

std::vector<double> to_list(const std::string &key, const std::string &v)
{
    std::vector<double> out;
    std::string tok;
    std::istringstream in(v);
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(to_double(key, tok));
    }
    if (out.empty()) throw ConfigError("config: " + key + " is empty");
    return out;
}

// runs f(i) for i in [0, n) on up to `threads` workers
template <class F>
void parallel_for(int n, int threads, F &&f)
{
    const int w = std::max(1, std::min(threads, n));
    if (w == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto &th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::string eps_tag(double eps)
{
    std::ostringstream os;
    os << std::setprecision(6) << eps;
    return os.str();
}

}  // namespace

std::map<std::string, std::string> ExperimentConfig::echo() const
{
    std::map<std::string, std::string> m;
    m["k"] = fmt(k);
    m["envelope"] = envelope.shape;
    m["eta"] = fmt(envelope.eta);
    m["width"] = fmt(envelope.width);
    m["envelope_file"] = envelope.file;
    std::string el;
    for (size_t i = 0; i < eps_list.size(); ++i) el += (i ? "," : "") + fmt(eps_list[i]);
    m["eps_list"] = el;
    m["slow_length"] = fmt(slow_length);
    m["n_slow"] = std::to_string(n_slow);
    m["points_per_wavelength"] = fmt(points_per_wavelength);
    m["n_points"] = std::to_string(n_points);
    m["sobolev_index"] = std::to_string(sobolev_index);
    m["horizon"] = fmt(horizon);
    m["dt"] = fmt(solver.dt);
    m["filter_floor"] = fmt(solver.filter_floor);
    m["coherence_tol"] = fmt(solver.coherence_tol);
    m["checkpoint_every"] = std::to_string(solver.checkpoint_every);
    m["max_chord_arc_ratio"] = fmt(solver.max_chord_arc_ratio);
    m["cfl"] = fmt(solver.cfl);
    m["error_every"] = std::to_string(solver.error_every);
    m["evolve_psi"] = solver.evolve_psi ? "true" : "false";
    m["project"] = solver.project ? "true" : "false";
    m["residual_dt"] = fmt(residual_dt);
    m["slope_target"] = fmt(slope_target);
    m["slope_band"] = fmt(slope_band);
    m["min_r_squared"] = fmt(min_r_squared);
    m["scaling_target"] = fmt(scaling_target);
    m["scaling_band"] = fmt(scaling_band);
    m["nls_eta"] = fmt(nls_eta);
    m["nls_length"] = fmt(nls_length);
    m["nls_n"] = std::to_string(nls_n);
    m["nls_T"] = fmt(nls_T);
    m["nls_dT"] = fmt(nls_dT);
    m["out_dir"] = out_dir;
    m["seed"] = std::to_string(seed);
    m["threads"] = std::to_string(threads);
    return m;
}

ExperimentConfig default_config(const std::string &sub)
{
    ExperimentConfig c;
    c.solver.coherence_tol = 1e-4;
    if (sub == "residuals" || sub == "nls-check") {
        c.eps_list = {0.04, 0.08, 0.16};
        c.slow_length = 2.0 * pi * 0.16 * 44.0;
        c.points_per_wavelength = 512.0 / 44.0;
    } else if (sub == "evolve" || sub == "error-scaling") {
        c.eps_list = sub == "evolve" ? std::vector<double>{0.1} : std::vector<double>{0.1, 0.05};
        c.slow_length = 2.0 * pi * 0.1 * 69.0;
        c.points_per_wavelength = 512.0 / 69.0;
    } else {
        throw ConfigError("unknown subcommand '" + sub + "'");
    }
    return c;
}

void apply_setting(ExperimentConfig &c, const std::string &key, const std::string &raw)
{
    const std::string v = trim(raw);
    if (key == "k") c.k = to_double(key, v);
    else if (key == "envelope") c.envelope.shape = v;
    else if (key == "eta") c.envelope.eta = to_double(key, v);
    else if (key == "width") c.envelope.width = to_double(key, v);
    else if (key == "envelope_file") c.envelope.file = v;
    else if (key == "eps_list") c.eps_list = to_list(key, v);
    else if (key == "slow_length") c.slow_length = to_double(key, v);
    else if (key == "slow_periods") c.slow_length = 2.0 * pi * to_double(key, v) / c.k;
    else if (key == "n_slow") c.n_slow = static_cast<int>(to_long(key, v));
    else if (key == "points_per_wavelength") c.points_per_wavelength = to_double(key, v);
    else if (key == "n_points") c.n_points = static_cast<int>(to_long(key, v));
    else if (key == "sobolev_index") c.sobolev_index = static_cast<int>(to_long(key, v));
    else if (key == "horizon") c.horizon = to_double(key, v);
    else if (key == "dt") c.solver.dt = to_double(key, v);
    else if (key == "filter_floor") c.solver.filter_floor = to_double(key, v);
    else if (key == "coherence_tol") c.solver.coherence_tol = to_double(key, v);
    else if (key == "checkpoint_every") c.solver.checkpoint_every = static_cast<int>(to_long(key, v));
    else if (key == "max_chord_arc_ratio") c.solver.max_chord_arc_ratio = to_double(key, v);
    else if (key == "cfl") c.solver.cfl = to_double(key, v);
    else if (key == "error_every") c.solver.error_every = static_cast<int>(to_long(key, v));
    else if (key == "evolve_psi") c.solver.evolve_psi = to_bool(key, v);
    else if (key == "project") c.solver.project = to_bool(key, v);
    else if (key == "residual_dt") c.residual_dt = to_double(key, v);
    else if (key == "slope_target") c.slope_target = to_double(key, v);
    else if (key == "slope_band") c.slope_band = to_double(key, v);
    else if (key == "min_r_squared") c.min_r_squared = to_double(key, v);
    else if (key == "scaling_target") c.scaling_target = to_double(key, v);
    else if (key == "scaling_band") c.scaling_band = to_double(key, v);
    else if (key == "nls_eta") c.nls_eta = to_double(key, v);
    else if (key == "nls_length") c.nls_length = to_double(key, v);
    else if (key == "nls_n") c.nls_n = static_cast<int>(to_long(key, v));
    else if (key == "nls_T") c.nls_T = to_double(key, v);
    else if (key == "nls_dT") c.nls_dT = to_double(key, v);
    else if (key == "out_dir") c.out_dir = v;
    else if (key == "seed") {
        const long s = to_long(key, v);
        if (s < 0) throw ConfigError("config: seed must be nonnegative");
        c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "threads") c.threads = static_cast<int>(to_long(key, v));
    else throw ConfigError("config: unknown key '" + key + "'");
}

void apply_config_text(ExperimentConfig &c, const std::string &text)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        apply_setting(c, key, line.substr(eq + 1));
    }
}

void apply_config_file(ExperimentConfig &c, const std::string &path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    apply_config_text(c, ss.str());
}

void validate(const ExperimentConfig &c)
{
    if (!(c.k > 0.0)) throw ConfigError("config: k must be positive");
    const std::string &sh = c.envelope.shape;
    if (sh != "sech" && sh != "gaussian" && sh != "file" && sh != "zero")
        throw ConfigError("config: envelope must be sech, gaussian, file or zero");
    if (sh != "zero" && !(c.envelope.eta > 0.0)) throw ConfigError("config: eta must be positive");
    if (sh == "gaussian" && !(c.envelope.width > 0.0)) throw ConfigError("config: width must be positive");
    if (sh == "file" && c.envelope.file.empty()) throw ConfigError("config: envelope = file needs envelope_file");
    if (c.eps_list.empty()) throw ConfigError("config: eps_list is empty");
    for (size_t i = 0; i < c.eps_list.size(); ++i) {
        const double e = c.eps_list[i];
        if (!(e > 0.0 && e < 1.0)) throw ConfigError("config: every eps must lie in (0, 1)");
        for (size_t j = 0; j < i; ++j)
            if (c.eps_list[j] == e) throw ConfigError("config: repeated eps " + fmt(e));
    }
    if (!(c.slow_length > 0.0)) throw ConfigError("config: slow_length must be positive");
    if (c.n_slow < 16) throw ConfigError("config: n_slow must be at least 16");
    if (c.n_points < 0) throw ConfigError("config: n_points must be nonnegative");
    if (c.n_points == 0 && !(c.points_per_wavelength > 0.0))
        throw ConfigError("config: points_per_wavelength must be positive when n_points is unset");
    if (c.sobolev_index < 4) throw ConfigError("config: sobolev_index must be at least 4");
    if (!(c.horizon >= 0.0)) throw ConfigError("config: horizon must be nonnegative");
    if (!(c.residual_dt > 0.0)) throw ConfigError("config: residual_dt must be positive");
    if (!(c.slope_band > 0.0) || !(c.scaling_band > 0.0)) throw ConfigError("config: bands must be positive");
    if (!(c.nls_eta > 0.0 && c.nls_length > 0.0 && c.nls_T > 0.0 && c.nls_dT > 0.0) || c.nls_n < 16)
        throw ConfigError("config: nls settings must be positive");
    if (c.threads < 1) throw ConfigError("config: threads must be at least 1");
    for (double e : c.eps_list) {
        const double periods = c.k * c.slow_length / (2.0 * pi * e);
        if (std::abs(periods - std::round(periods)) > 1e-8 * std::max(1.0, periods)) {
            std::ostringstream os;
            os << "config: k L / 2 pi = " << std::setprecision(12) << periods << " is not an integer at eps = " << e;
            throw ConfigError(os.str());
        }
        if (fast_points(c, e) < c.n_slow) throw ConfigError("config: fast grid coarser than the slow grid at eps = " + fmt(e));
    }
    SolverConfig probe = c.solver;
    for (double e : c.eps_list) wwp::validate(probe, Grid(fast_points(c, e), c.slow_length / e));
}

Grid slow_grid(const ExperimentConfig &c) { return Grid(c.n_slow, c.slow_length); }

int fast_points(const ExperimentConfig &c, double eps)
{
    if (c.n_points > 0) return c.n_points;
    const double periods = c.k * c.slow_length / (2.0 * pi * eps);
    int n = static_cast<int>(std::lround(c.points_per_wavelength * periods));
    return n + (n & 1);
}

Envelope initial_envelope(const ExperimentConfig &c)
{
    const Carrier car = dispersion(c.k);
    const Grid g = slow_grid(c);
    const std::string &sh = c.envelope.shape;
    if (sh == "sech") return soliton(c.envelope.eta, car, g);
    if (sh == "gaussian") return gaussian_envelope(c.envelope.eta, c.envelope.width, car, g);
    if (sh == "zero") return Envelope{Field(g), 0.0, car};
    std::ifstream in(c.envelope.file);
    if (!in) throw ConfigError("cannot read envelope file " + c.envelope.file);
    std::string line;
    std::getline(in, line);
    Field B(g);
    int j = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        std::string x, re, im;
        if (!std::getline(ls, x, ',') || !std::getline(ls, re, ',') || !std::getline(ls, im, ','))
            throw ConfigError("envelope file: expected X,re_B,im_B");
        if (j >= g.n) throw ConfigError("envelope file: more rows than n_slow");
        B.v[j++] = cd(to_double("re_B", re), to_double("im_B", im));
    }
    if (j != g.n) throw ConfigError("envelope file: row count differs from n_slow");
    return Envelope{B, 0.0, car};
}

namespace {

std::shared_ptr<EnvelopeSource> envelope_source(const ExperimentConfig &c)
{
    if (c.envelope.shape == "sech") return std::make_shared<SolitonSource>(c.envelope.eta, dispersion(c.k), slow_grid(c));
    Envelope B0 = initial_envelope(c);
    return std::make_shared<NlsTrajectory>(B0, default_dT(B0.grid(), B0.carrier));
}

}  // namespace

ResidualSweep residual_sweep(const ExperimentConfig &c)
{
    const Envelope B = initial_envelope(c);
    const int ne = static_cast<int>(c.eps_list.size());
    const int nf = static_cast<int>(residual_families.size());
    std::vector<std::vector<double>> norms(ne, std::vector<double>(nf));
    std::vector<int> ns(ne);
    ResidualOptions opt;
    opt.dt = c.residual_dt;
    opt.s = c.sobolev_index;
    parallel_for(ne, c.threads, [&](int i) {
        const double eps = c.eps_list[i];
        const Grid fast = fast_grid(B.grid(), eps, fast_points(c, eps), c.k);
        ns[i] = fast.n;
        PacketState p = build_packet(B, eps, 0.0, fast);
        norms[i][0] = sobolev_norm(residual_neweuler({B, eps, 0.0, fast}, opt), opt.s);
        norms[i][1] = sobolev_norm(residual_antihol(p), opt.s);
        norms[i][2] = sobolev_norm(residual_dt_antihol(p), opt.s);
        norms[i][3] = sobolev_norm(residual_b(p), opt.s);
        norms[i][4] = sobolev_norm(residual_bernoulli(p), opt.s);
    });

    std::vector<int> order(ne);
    for (int i = 0; i < ne; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return c.eps_list[a] < c.eps_list[b]; });

    ResidualSweep out;
    for (int f = 0; f < nf; ++f) {
        std::vector<double> e, n;
        for (int i : order) {
            e.push_back(c.eps_list[i]);
            n.push_back(norms[i][f]);
        }
        std::string verdict;
        OrderFit fit;
        fit.epsilons = e;
        fit.norms = n;
        if (ne < 2) {
            verdict = "norms_only";
            for (double x : n)
                if (!(x > 1e-11)) verdict = "floor";
        } else {
            fit = order_fit(e, n);
            if (fit.below_floor) verdict = "floor";
            else if (std::abs(fit.slope - c.slope_target) <= c.slope_band && fit.r_squared >= c.min_r_squared) verdict = "pass";
            else verdict = "fail";
        }
        if (verdict == "fail") out.pass = false;
        out.fits.push_back(fit);
        for (int i : order)
            out.rows.push_back({residual_families[f], c.eps_list[i], ns[i], norms[i][f],
                                verdict == "pass" || verdict == "fail" ? fit.slope : std::nan(""),
                                verdict == "pass" || verdict == "fail" ? fit.r_squared : std::nan(""), verdict});
    }
    return out;
}

EvolveResult evolve_one(const ExperimentConfig &c, double eps)
{
    auto src = envelope_source(c);
    const Carrier car = dispersion(c.k);
    EvolveResult r;
    r.eps = eps;
    int n = fast_points(c, eps);
    for (int attempt = 1; attempt <= 2; ++attempt) {
        const Grid fast = fast_grid(src->grid(), eps, n, c.k);
        auto provider = [&, fast](double t) { return build_packet(src->at(eps * eps * t), eps, t, fast); };
        PacketState p0 = provider(0.0);
        r.n = n;
        r.attempts = attempt;
        r.admissible = admissible_data(p0, 1e-12, 80, c.sobolev_index);
        const CurveState &s0 = r.admissible.state;
        r.admissible_xi = sobolev_norm(s0.curve.xi - p0.xi_tilde, c.sobolev_index);
        r.admissible_v = sobolev_norm(s0.u - p0.dt_zeta, c.sobolev_index);
        const cd iw = I * car.omega;
        r.admissible_w = sobolev_norm(s0.w - (eps * iw * iw) * p0.zeta1, c.sobolev_index);
        SolverConfig sc = c.solver;
        sc.sobolev_index = c.sobolev_index;
        if (sc.checkpoint_every > 0) sc.checkpoint_path = (fs::path(c.out_dir) / ("checkpoint_eps" + eps_tag(eps) + ".bin")).string();
        CurveState s = s0;
        r.report = run(s, sc, c.horizon / (eps * eps), provider, true);
        if (r.report.termination != Termination::coherence_loss) break;
        n *= 2;
    }
    return r;
}

ScalingResult error_scaling(const ExperimentConfig &c)
{
    ScalingResult out;
    const int ne = static_cast<int>(c.eps_list.size());
    out.runs.resize(ne);
    parallel_for(ne, c.threads, [&](int i) { out.runs[i] = evolve_one(c, c.eps_list[i]); });
    std::sort(out.runs.begin(), out.runs.end(), [](const EvolveResult &a, const EvolveResult &b) { return a.eps < b.eps; });
    bool completed = true;
    std::vector<double> e, err, eul;
    for (const auto &r : out.runs) {
        completed = completed && r.report.termination == Termination::completed;
        e.push_back(r.eps);
        err.push_back(r.report.max_error);
        eul.push_back(r.report.max_eulerian_error);
    }
    if (ne >= 2) {
        out.error_fit = order_fit(e, err);
        out.eulerian_fit = order_fit(e, eul);
        out.pass = completed && !out.error_fit.below_floor &&
                   std::abs(out.error_fit.slope - c.scaling_target) <= c.scaling_band &&
                   std::abs(out.eulerian_fit.slope - c.scaling_target) <= c.scaling_band;
    }
    return out;
}

std::string git_blob_hash(const std::string &content)
{
    const std::string head = "blob " + std::to_string(content.size()) + '\0';
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), head.data(), head.size()) != 1 ||
        EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw std::runtime_error("sha1 digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string file_blob_hash(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return git_blob_hash(ss.str());
}

void write_manifest(const std::string &dir, const std::string &sub, const ExperimentConfig &c,
                    const std::vector<std::string> &files, int exit_code)
{
    nlohmann::ordered_json j;
    j["subcommand"] = sub;
    j["exit_code"] = exit_code;
    nlohmann::ordered_json cfg;
    for (const auto &[k, v] : c.echo()) cfg[k] = v;
    j["config"] = cfg;
    std::string all;
    nlohmann::ordered_json outs = nlohmann::ordered_json::array();
    for (const auto &f : files) {
        const std::string h = file_blob_hash((fs::path(dir) / f).string());
        outs.push_back({{"file", f}, {"sha1", h}});
        all += f + ' ' + h + '\n';
    }
    j["outputs"] = outs;
    j["content_hash"] = git_blob_hash(all);
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    out << j.dump(2) << '\n';
}

int run_nls_check(const ExperimentConfig &c)
{
    validate(c);
    fs::create_directories(c.out_dir);
    const Carrier car = dispersion(c.k);
    const Grid g(c.nls_n, c.nls_length);
    const Envelope B0 = soliton(c.nls_eta, car, g);
    const Envelope exact = soliton_at(c.nls_eta, car, g, c.nls_T);
    std::vector<double> dts = {c.nls_dT, 2.0 * c.nls_dT, 4.0 * c.nls_dT}, errs;
    double mass_drift = 0.0, ham_drift = 0.0;
    for (double dT : dts) {
        Envelope B = nls_solve(B0, c.nls_T, dT);
        errs.push_back(l2_norm(B.B - exact.B));
        if (dT == c.nls_dT) {
            mass_drift = std::abs(mass(B) - mass(B0)) / mass(B0);
            ham_drift = std::abs(hamiltonian(B) - hamiltonian(B0)) / std::abs(hamiltonian(B0));
        }
    }
    OrderFit fit = order_fit(dts, errs);

    struct Row {
        std::string test;
        double value, threshold;
        bool pass;
    };
    std::vector<Row> rows = {
        {"soliton_l2_error", errs[0], 1e-8, errs[0] <= 1e-8},
        {"mass_drift", mass_drift, 1e-12, mass_drift <= 1e-12},
        {"strang_slope", fit.slope, 0.1, std::abs(fit.slope - 2.0) <= 0.1},
        {"hamiltonian_drift", ham_drift, 1e-6, ham_drift <= 1e-6},
    };
    bool pass = true;
    const std::string name = "nls_report.csv";
    {
        std::ofstream out(fs::path(c.out_dir) / name);
        out << "test,value,threshold,pass\n" << std::setprecision(10);
        for (const auto &r : rows) {
            out << r.test << ',' << r.value << ',' << r.threshold << ',' << (r.pass ? "true" : "false") << '\n';
            pass = pass && r.pass;
        }
        for (size_t i = 0; i < dts.size(); ++i) out << "error_dT_" << dts[i] << ',' << errs[i] << ",,\n";
    }
    const int code = static_cast<int>(pass ? ExitCode::pass : ExitCode::band_failure);
    write_manifest(c.out_dir, "nls-check", c, {name}, code);
    return code;
}

int run_residuals(const ExperimentConfig &c)
{
    validate(c);
    fs::create_directories(c.out_dir);
    ResidualSweep sw = residual_sweep(c);
    const std::string name = "convergence.csv";
    write_convergence_csv(sw.rows, (fs::path(c.out_dir) / name).string());
    const int code = static_cast<int>(sw.pass ? ExitCode::pass : ExitCode::band_failure);
    write_manifest(c.out_dir, "residuals", c, {name}, code);
    return code;
}

namespace {

void write_admissible_csv(const EvolveResult &r, const std::string &path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << std::setprecision(12);
    out << "quantity,value\n";
    out << "eps," << r.eps << '\n';
    out << "n," << r.n << '\n';
    out << "iterations," << r.admissible.iterations << '\n';
    out << "contraction_ratio," << r.admissible.contraction_ratio << '\n';
    out << "dist_xi," << r.admissible_xi << '\n';
    out << "dist_v," << r.admissible_v << '\n';
    out << "dist_w," << r.admissible_w << '\n';
    for (size_t i = 0; i < r.admissible.increments.size(); ++i) out << "increment_" << i << ',' << r.admissible.increments[i] << '\n';
}

void write_summary_csv(const std::vector<EvolveResult> &runs, const std::string &path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "eps,n,attempts,termination,steps,final_time,max_error,max_error_over_eps32,max_eulerian_error,max_coherence,"
           "dist_xi,dist_v,dist_w,contraction_ratio\n"
        << std::setprecision(10);
    for (const auto &r : runs)
        out << r.eps << ',' << r.n << ',' << r.attempts << ',' << to_string(r.report.termination) << ',' << r.report.steps << ','
            << r.report.final_time << ',' << r.report.max_error << ',' << r.report.max_error / std::pow(r.eps, 1.5) << ','
            << r.report.max_eulerian_error << ',' << r.report.max_coherence << ',' << r.admissible_xi << ',' << r.admissible_v
            << ',' << r.admissible_w << ',' << r.admissible.contraction_ratio << '\n';
}

}  // namespace

int run_evolve(const ExperimentConfig &c)
{
    validate(c);
    fs::create_directories(c.out_dir);
    EvolveResult r = evolve_one(c, c.eps_list.front());
    const std::string tag = eps_tag(r.eps);
    std::vector<std::string> files = {"run_report_eps" + tag + ".csv", "admissible_eps" + tag + ".csv", "summary.csv"};
    write_report_csv(r.report, (fs::path(c.out_dir) / files[0]).string());
    write_admissible_csv(r, (fs::path(c.out_dir) / files[1]).string());
    write_summary_csv({r}, (fs::path(c.out_dir) / files[2]).string());
    const int code = static_cast<int>(r.report.termination == Termination::completed ? ExitCode::pass : ExitCode::regime);
    write_manifest(c.out_dir, "evolve", c, files, code);
    return code;
}

int run_error_scaling(const ExperimentConfig &c)
{
    validate(c);
    fs::create_directories(c.out_dir);
    ScalingResult sr = error_scaling(c);
    std::vector<std::string> files;
    for (const auto &r : sr.runs) {
        const std::string tag = eps_tag(r.eps);
        files.push_back("run_report_eps" + tag + ".csv");
        write_report_csv(r.report, (fs::path(c.out_dir) / files.back()).string());
        files.push_back("admissible_eps" + tag + ".csv");
        write_admissible_csv(r, (fs::path(c.out_dir) / files.back()).string());
    }
    files.push_back("summary.csv");
    write_summary_csv(sr.runs, (fs::path(c.out_dir) / files.back()).string());
    files.push_back("scaling.csv");
    {
        std::ofstream out(fs::path(c.out_dir) / files.back());
        out << "quantity,slope,r2,target,band,verdict\n" << std::setprecision(10);
        const bool enough = sr.runs.size() >= 2;
        auto verdict = [&](const OrderFit &f) {
            if (!enough) return std::string("norms_only");
            if (f.below_floor) return std::string("floor");
            return std::string(std::abs(f.slope - c.scaling_target) <= c.scaling_band ? "pass" : "fail");
        };
        out << "max_error," << sr.error_fit.slope << ',' << sr.error_fit.r_squared << ',' << c.scaling_target << ','
            << c.scaling_band << ',' << verdict(sr.error_fit) << '\n';
        out << "max_eulerian_error," << sr.eulerian_fit.slope << ',' << sr.eulerian_fit.r_squared << ',' << c.scaling_target
            << ',' << c.scaling_band << ',' << verdict(sr.eulerian_fit) << '\n';
    }
    bool completed = true;
    for (const auto &r : sr.runs) completed = completed && r.report.termination == Termination::completed;
    int code;
    if (!completed) code = static_cast<int>(ExitCode::regime);
    else if (sr.runs.size() < 2 || sr.pass) code = static_cast<int>(ExitCode::pass);
    else code = static_cast<int>(ExitCode::band_failure);
    write_manifest(c.out_dir, "error-scaling", c, files, code);
    return code;
}

}  // namespace wwp
