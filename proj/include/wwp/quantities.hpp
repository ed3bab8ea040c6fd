#pragma once

#include <optional>
#include <vector>

#include "wwp/curveops.hpp"
#include "wwp/packet.hpp"

namespace wwp {

struct CurveState {
    Curve curve;
    Field u;  // D_t zeta
    Field b;
    Field A;
    Field w;  // D_t^2 zeta = i A zeta_alpha - i
    double time = 0.0;
    std::optional<Field> psi;

    const Grid &grid() const { return curve.grid; }
};

Field compute_b(const CurveKernel &k, const Field &u);

struct AResult {
    Field A;
    Field w;
    int iterations = 0;
};

// A with the closure w = i A zeta_alpha - i, fixed point started from A = 1
AResult compute_A(const CurveKernel &k, const Field &u, double tol = 1e-12, int max_iter = 50);
// A for a prescribed w (no closure)
Field compute_A_given_w(const CurveKernel &k, const Field &u, const Field &w);

Field compute_G(const CurveKernel &k, const Field &u);
Field compute_DtG(const CurveKernel &k, const Field &u, const Field &w);
Field compute_at_over_a(const CurveKernel &k, const Field &u, const Field &w, const Field &A);
Field compute_Dtb(const CurveKernel &k, const Field &u, const Field &w, const Field &b);

// fills b, A, w for the given curve and velocity
CurveState make_state(const Field &xi, const Field &u, double t = 0.0);
CurveState make_state(const CurveKernel &k, const Field &u, double t = 0.0);

Field compute_b(const CurveState &s);
Field compute_A(const CurveState &s);
Field compute_G(const CurveState &s);
Field compute_DtG(const CurveState &s);
Field compute_at_over_a(const CurveState &s);
Field compute_Dtb(const CurveState &s);

// || (I - conj H_zeta) u ||_{L2}
double coherence(const CurveKernel &k, const Field &u);

struct RemainderDiagnostics {
    double E_s = 0.0;
    double energy_total = 0.0;
    std::vector<double> energy_E;  // per derivative order
    std::vector<double> energy_F;
    double holo_form_min = 0.0;    // smallest i int phi conj(phi_alpha) over orders
    double rho_norm = 0.0;
    double sigma_norm = 0.0;
    double err_zeta_alpha = 0.0;   // || zeta_alpha - zeta~_alpha ||_{H^s}
    double err_u = 0.0;            // || D_t zeta - D~_t zeta~ ||_{H^s}
};

RemainderDiagnostics remainder_diagnostics(const CurveState &st, const CurveKernel &k, const PacketState &p, int s = 4);
RemainderDiagnostics remainder_diagnostics(const CurveState &st, const PacketState &p, int s = 4);

// i int f conj(f_alpha) d alpha
cd holomorphic_form(const Field &f);

}  // namespace wwp
