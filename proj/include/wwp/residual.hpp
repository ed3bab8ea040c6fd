#pragma once

#include <string>
#include <vector>

#include "wwp/jet.hpp"
#include "wwp/packet.hpp"

namespace wwp {

template <class F>
F flat_commutator(const F &g, const F &f)
{
    return g * flat_hilbert(f) - flat_hilbert(g * f);
}

// terms of H~ = H0 + eps H1 + eps^2 H2 built from flat commutators
template <class F>
F expanded_hilbert(int order, const F &zeta1, const F &zeta2, const F &f)
{
    switch (order) {
    case 0:
        return flat_hilbert(f);
    case 1:
        return flat_commutator(zeta1, derivative(f, 1));
    case 2: {
        const F fa = derivative(f, 1);
        const F faa = derivative(fa, 1);
        const F inner = flat_commutator(zeta1, faa);
        const F dbl = zeta1 * inner - flat_commutator(zeta1, zeta1 * faa);
        return flat_commutator(zeta2, fa) - flat_commutator(zeta1, derivative(zeta1, 1) * fa) + 0.5 * dbl;
    }
    default:
        throw std::invalid_argument("expanded_hilbert: order must be 0, 1 or 2");
    }
}

template <class F>
F approx_hilbert(double eps, const F &zeta1, const F &zeta2, const F &f)
{
    return expanded_hilbert(0, zeta1, zeta2, f) + eps * expanded_hilbert(1, zeta1, zeta2, f) +
           (eps * eps) * expanded_hilbert(2, zeta1, zeta2, f);
}

struct ResidualOptions {
    double dt = 1e-2;   // temporal differencing step
    double s = 4.0;     // Sobolev index of reported norms
};

// packet and its envelope, enough to rebuild the bundle at nearby times
struct PacketContext {
    Envelope B;  // at T = eps^2 t
    double eps;
    double t;
    Grid fast;
};

Field residual_neweuler(const PacketContext &ctx, const ResidualOptions &opt = {});
Field residual_antihol(const PacketState &p);
Field residual_dt_antihol(const PacketState &p);
Field residual_b(const PacketState &p);
Field residual_bernoulli(const PacketState &p);

// the packet envelope at slow time T + dT_step from a single symmetric NLS step
Envelope envelope_nearby(const Envelope &B, double dT_step);

struct OrderFit {
    std::vector<double> epsilons;
    std::vector<double> norms;
    double slope = 0.0;
    double r_squared = 0.0;
    bool below_floor = false;
};

OrderFit order_fit(const std::vector<double> &eps, const std::vector<double> &norms, double floor = 1e-11);

struct ConvergenceRow {
    std::string equation;
    double eps;
    int n;
    double norm;
    double slope;
    double r_squared;
    std::string verdict;
};

void write_convergence_csv(const std::vector<ConvergenceRow> &rows, const std::string &path);

extern const std::vector<std::string> residual_families;

}  // namespace wwp
