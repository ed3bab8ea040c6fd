#pragma once

#include <string>

#include "wwp/jet.hpp"
#include "wwp/nls.hpp"

namespace wwp {

struct PacketState {
    Field zeta_tilde;
    Field xi_tilde;
    Field dt_zeta;
    Field dt2_zeta;
    Field b_tilde;
    double a_tilde = 1.0;
    Field psi_tilde;
    Field lambda_tilde;
    Field dt_psi;
    double epsilon = 0.0;
    double time = 0.0;
    Carrier carrier;

    // multiscale pieces on the fast grid
    Field zeta1, zeta2, zeta3;
    Field B;      // envelope lifted to the fast grid
    Field phase;  // e^{i phi}
    // time jets of xi, b, zeta1, zeta2
    Jet xi_jet, b_jet, zeta1_jet, zeta2_jet;

    const Grid &grid() const { return zeta_tilde.grid; }
};

struct PacketGrids {
    Grid slow;
    Grid fast;
};

// fast grid compatible with the slow grid: length L_slow/eps with n points; checks carrier admissibility
Grid fast_grid(const Grid &slow, double eps, int n_points, double k);
void validate_packet_grids(const Grid &slow, const Grid &fast, double eps, double k);

// evaluate a slow-grid field at X = eps (alpha + w' t) on the fast grid
Field lift(const Field &slow, const Grid &fast, double eps, double shift_X);

// full bundle at time t from the envelope at slow time T = eps^2 t
PacketState build_packet(const Envelope &B, double eps, double t, const Grid &fast);

std::pair<Field, Field> build_zeta(const Envelope &B, double eps, double t, const Grid &fast);
std::pair<Field, Field> build_time_derivatives(const Envelope &B, double eps, double t, const Grid &fast);
Field build_b_tilde(const Envelope &B, double eps, double t, const Grid &fast);
std::pair<Field, Field> build_psi_lambda(const Envelope &B, double eps, double t, const Grid &fast);

// D~_t and D~_t^2 of a jet using the packet's b~
Field packet_dt(const PacketState &p, const Jet &f);
Field packet_dt2(const PacketState &p, const Jet &f);

// slow time derivative of the envelope from the NLS
Field envelope_dT(const Envelope &B);

void write_packet_csv(const PacketState &p, const std::string &path);

}  // namespace wwp
