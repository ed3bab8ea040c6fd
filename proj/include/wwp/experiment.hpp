#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wwp/evolve.hpp"
#include "wwp/residual.hpp"

namespace wwp {

enum class ExitCode : int { pass = 0, band_failure = 1, regime = 2 };

struct EnvelopeSpec {
    std::string shape = "sech";  // sech | gaussian | file | zero
    double eta = 1.0;
    double width = 2.0;          // gaussian
    std::string file;            // CSV X,re_B,im_B on the slow grid
};

struct ExperimentConfig {
    double k = 1.0;
    EnvelopeSpec envelope;
    std::vector<double> eps_list;
    double slow_length = 0.0;
    int n_slow = 512;
    double points_per_wavelength = 0.0;
    int n_points = 0;  // fixed fast-grid size when positive
    int sobolev_index = 4;
    double horizon = 0.5;  // slow time: runs reach t = horizon / eps^2
    SolverConfig solver;
    double residual_dt = 1e-2;
    double slope_target = 3.5;
    double slope_band = 0.3;
    double min_r_squared = 0.98;
    double scaling_target = 1.5;
    double scaling_band = 0.4;
    double nls_eta = 0.5;
    double nls_length = 100.0;
    int nls_n = 1024;
    double nls_T = 5.0;
    double nls_dT = 1e-3;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;

    std::map<std::string, std::string> echo() const;
};

// defaults for a subcommand: "nls-check", "residuals", "evolve", "error-scaling"
ExperimentConfig default_config(const std::string &subcommand);

// flat "key = value" text, '#' comments; unknown keys and malformed values raise ConfigError
void apply_config_text(ExperimentConfig &cfg, const std::string &text);
void apply_config_file(ExperimentConfig &cfg, const std::string &path);
void apply_setting(ExperimentConfig &cfg, const std::string &key, const std::string &value);

void validate(const ExperimentConfig &cfg);

Grid slow_grid(const ExperimentConfig &cfg);
int fast_points(const ExperimentConfig &cfg, double eps);
Envelope initial_envelope(const ExperimentConfig &cfg);

struct ResidualSweep {
    std::vector<ConvergenceRow> rows;
    std::vector<OrderFit> fits;  // one per family, in residual_families() order
    bool pass = true;
};

ResidualSweep residual_sweep(const ExperimentConfig &cfg);

struct EvolveResult {
    double eps = 0.0;
    int n = 0;
    AdmissibleData admissible;
    RunReport report;
    double admissible_xi = 0.0;  // || xi0 - xi~(0) ||_{H^s}
    double admissible_v = 0.0;   // || v0 - D~_t zeta~(0) ||_{H^s}
    double admissible_w = 0.0;   // || w0 - eps (i omega)^2 zeta1(0) ||_{H^s}
    int attempts = 1;
};

// builds the packet, admissible data and runs to horizon / eps^2; retries once at 2N on coherence loss
EvolveResult evolve_one(const ExperimentConfig &cfg, double eps);

struct ScalingResult {
    std::vector<EvolveResult> runs;
    OrderFit error_fit;
    OrderFit eulerian_fit;
    bool pass = false;
};

ScalingResult error_scaling(const ExperimentConfig &cfg);

// git blob hash (sha1 of "blob <size>\0" + content), lowercase hex
std::string git_blob_hash(const std::string &content);
std::string file_blob_hash(const std::string &path);
void write_manifest(const std::string &dir, const std::string &subcommand, const ExperimentConfig &cfg,
                    const std::vector<std::string> &files, int exit_code);

int run_nls_check(const ExperimentConfig &cfg);
int run_residuals(const ExperimentConfig &cfg);
int run_evolve(const ExperimentConfig &cfg);
int run_error_scaling(const ExperimentConfig &cfg);

}  // namespace wwp
