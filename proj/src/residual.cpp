#include "wwp/residual.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "wwp/curveops.hpp"
#include "wwp/quantities.hpp"

namespace wwp {

const std::vector<std::string> residual_families = {"neweuler", "antihol", "dt_antihol", "b_formula", "bernoulli"};

Envelope envelope_nearby(const Envelope &B, double dT_step)
{
    if (dT_step == 0.0) return B;
    return nls_step(B, dT_step);
}

Field residual_neweuler(const PacketContext &ctx, const ResidualOptions &opt)
{
    const double d = opt.dt;
    const double e2 = ctx.eps * ctx.eps;
    Field F[5];
    PacketState p0;
    for (int j = -2; j <= 2; ++j) {
        Envelope Bj = envelope_nearby(ctx.B, e2 * j * d);
        PacketState p = build_packet(Bj, ctx.eps, ctx.t + j * d, ctx.fast);
        CurveKernel k(Curve::from_xi(p.xi_tilde));
        F[j + 2] = p.xi_tilde - curve_hilbert(k, p.xi_tilde);
        if (j == 0) p0 = p;
    }
    Field Ft = (1.0 / (12.0 * d)) * (-1.0 * F[4] + 8.0 * F[3] - 8.0 * F[1] + F[0]);
    Field Ftt = (1.0 / (12.0 * d * d)) * (-1.0 * F[4] + 16.0 * F[3] - 30.0 * F[2] + 16.0 * F[1] - F[0]);
    const Field &b = p0.b_tilde;
    Field Fa = derivative(F[2], 1);
    Field Faa = derivative(Fa, 1);
    Field Fat = derivative(Ft, 1);
    Field ba = derivative(b, 1);
    Field PF = Ftt + p0.b_jet.v[1] * Fa + 2.0 * (b * Fat) + b * ba * Fa + b * b * Faa - p0.a_tilde * I * Fa;
    CurveKernel k0(Curve::from_xi(p0.xi_tilde));
    return PF - compute_G(k0, p0.dt_zeta);
}

Field residual_antihol(const PacketState &p)
{
    CurveKernel k(Curve::from_xi(p.xi_tilde));
    return p.xi_tilde - conj_curve_hilbert(k, p.xi_tilde);
}

Field residual_dt_antihol(const PacketState &p)
{
    CurveKernel k(Curve::from_xi(p.xi_tilde));
    return p.dt_zeta - conj_curve_hilbert(k, p.dt_zeta);
}

Field residual_b(const PacketState &p)
{
    CurveKernel k(Curve::from_xi(p.xi_tilde));
    return p.b_tilde - curve_hilbert(k, p.b_tilde) + commutator(k, p.dt_zeta, p.xi_tilde.conj());
}

Field residual_bernoulli(const PacketState &p)
{
    Field out = p.dt_psi + p.zeta_tilde.imag();
    for (int j = 0; j < out.size(); ++j) out.v[j] -= 0.5 * std::norm(p.dt_zeta.v[j]);
    return out;
}

OrderFit order_fit(const std::vector<double> &eps, const std::vector<double> &norms, double floor)
{
    if (eps.size() != norms.size()) throw std::invalid_argument("order_fit: size mismatch");
    if (eps.size() < 2) throw std::invalid_argument("order_fit: need at least two points");
    for (size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw std::invalid_argument("order_fit: epsilons must be positive");
        for (size_t j = 0; j < i; ++j)
            if (eps[j] == eps[i]) throw std::invalid_argument("order_fit: repeated epsilon");
    }
    OrderFit f;
    f.epsilons = eps;
    f.norms = norms;
    for (double n : norms) {
        if (!(n > floor)) {
            f.below_floor = true;
            return f;
        }
    }
    const double m = static_cast<double>(eps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < eps.size(); ++i) {
        const double x = std::log(eps[i]), y = std::log(norms[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double cxx = sxx - sx * sx / m, cxy = sxy - sx * sy / m, cyy = syy - sy * sy / m;
    f.slope = cxy / cxx;
    f.r_squared = cyy > 0 ? cxy * cxy / (cxx * cyy) : 1.0;
    return f;
}

void write_convergence_csv(const std::vector<ConvergenceRow> &rows, const std::string &path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "equation_name,eps,N,norm,slope,r2,verdict\n" << std::setprecision(10);
    for (const auto &r : rows)
        out << r.equation << ',' << r.eps << ',' << r.n << ',' << r.norm << ',' << r.slope << ',' << r.r_squared << ','
            << r.verdict << '\n';
}

}  // namespace wwp
