#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wwp/quantities.hpp"

namespace wwp {

struct SolverConfig {
    double dt = 0.1;
    double filter_floor = 1e-13;
    int rk_order = 4;
    double coherence_tol = 1e-4;
    int checkpoint_every = 0;
    std::string checkpoint_path;
    double max_chord_arc_ratio = 10.0;
    double cfl = 0.5;         // dt <= cfl * sqrt(h)
    int error_every = 50;     // report cadence in steps
    int sobolev_index = 4;
    bool evolve_psi = false;
    bool project = true;      // restore the holomorphy constraints after each step
};

void validate(const SolverConfig &cfg, const Grid &g);

// time derivatives of (xi, u, psi)
struct Rates {
    Field xi;
    Field u;
    std::optional<Field> psi;
};

// state carries b, A, w for the current (xi, u)
Rates rhs(const CurveState &s, double filter_floor = 1e-13);

// torus projector onto boundary values of functions bounded and holomorphic on the fluid side
// (applied to conj f): (1/2)(f + conj H f) + (1/2L) int f conj(zeta_alpha)
Field antiholomorphic_part(const CurveKernel &k, const Field &f);

// 2 || f - P f ||_{L2}, the defect of the holomorphy constraint up to its constant
double constraint_defect(const CurveKernel &k, const Field &f);

struct StepInfo {
    double xi_drift = 0.0;  // constraint defects removed by the projection
    double u_drift = 0.0;
};

CurveState step(const CurveState &s, const SolverConfig &cfg, StepInfo *info = nullptr);

enum class Termination { completed, chord_arc_violation, coherence_loss, nan, regime };
const char *to_string(Termination t);

struct ReportRow {
    double t = 0.0;
    double err_zeta_alpha = 0.0;
    double err_u = 0.0;
    double E_s = 0.0;
    double energy_total = 0.0;
    double coherence = 0.0;
    double chord_arc_min = 0.0;
    double mean_im_zeta = 0.0;
    double eulerian_err = -1.0;  // || eta_x - eps k Re zeta1 ||_{H^s}, negative when not computed
};

struct RunReport {
    std::vector<ReportRow> rows;
    Termination termination = Termination::completed;
    std::string message;
    long steps = 0;
    double final_time = 0.0;
    double max_error = 0.0;           // max over rows of err_zeta_alpha + err_u
    double max_eulerian_error = 0.0;
    double max_coherence = 0.0;       // largest per-step constraint drift before projection

    std::vector<double> times() const;
    std::vector<double> error_norms() const;
};

using PacketProvider = std::function<PacketState(double t)>;

// integrates to T_final; the state is advanced in place so callers can inspect the final state
RunReport run(CurveState &s, const SolverConfig &cfg, double T_final, const PacketProvider &packet,
              bool eulerian = true);

void write_report_csv(const RunReport &r, const std::string &path);

struct AdmissibleData {
    CurveState state;
    std::vector<double> increments;  // ||g_{n+1} - g_n||_{H^s}
    double contraction_ratio = 0.0;  // max of successive increment ratios
    int iterations = 0;
};

// g_{n+1} = P_{alpha + g_n} xi~(0), v0 = P_{zeta0} D~_t zeta~(0), w0 = i A0 zeta0_alpha - i
AdmissibleData admissible_data(const PacketState &p0, double tol = 1e-12, int max_iter = 80, int s = 4);

struct EulerianProfile {
    rvec x;
    rvec alpha;
    rvec eta;
    cvec velocity;
};

// inverts x(alpha) = alpha + Re xi(alpha) at the grid nodes
EulerianProfile eulerian_profile(const CurveState &s, double tol = 1e-12);

// || eta_x - eps k Re zeta1 ||_{H^s} on the Eulerian grid
double eulerian_error(const CurveState &s, const PacketState &p, int sobolev_index);

// little-endian checkpoint: magic, version, n, length, time, flags, then xi, u, (psi) as interleaved doubles
void write_checkpoint(const CurveState &s, const std::string &path);
CurveState read_checkpoint(const std::string &path);

}  // namespace wwp
