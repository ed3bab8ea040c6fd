#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "wwp/curveops.hpp"
#include "wwp/residual.hpp"

using namespace wwp;

namespace {

const Carrier car = dispersion(1.0);
const double kSlowLength = 2 * pi * 0.16 * 44;

Grid slow() { return Grid(512, kSlowLength); }

Grid fast(double eps, double scale = 1.0)
{
    const int n = static_cast<int>(std::lround(scale * 512 * 0.16 / eps));
    return fast_grid(slow(), eps, n, 1.0);
}

const Envelope &soliton_env()
{
    static const Envelope B = soliton(1.0, car, slow());
    return B;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(OrderFit, ExactPowers)
{
    const std::vector<double> e = {0.04, 0.08, 0.16};
    std::vector<double> n4, n35;
    for (double x : e) {
        n4.push_back(std::pow(x, 4));
        n35.push_back(3.0 * std::pow(x, 3.5));
    }
    OrderFit f = order_fit(e, n4);
    EXPECT_NEAR(f.slope, 4.0, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(order_fit(e, n35).slope, 3.5, 1e-12);
    EXPECT_NEAR(order_fit({0.16, 0.04, 0.08}, {n35[2], n35[0], n35[1]}).slope, 3.5, 1e-12);
}

TEST(OrderFit, RefusesUnderdeterminedAndFloor)
{
    EXPECT_THROW(order_fit({0.1}, {1e-3}), std::invalid_argument);
    EXPECT_THROW(order_fit({0.1, 0.1}, {1e-3, 2e-3}), std::invalid_argument);
    EXPECT_THROW(order_fit({0.1, -0.2}, {1e-3, 2e-3}), std::invalid_argument);
    OrderFit f = order_fit({0.04, 0.08, 0.16}, {0.0, 1e-13, 1e-3});
    EXPECT_TRUE(f.below_floor);
}

TEST(ExpandedHilbert, Examples)
{
    const Grid g(64, 2 * pi);
    Field f = Field::from_function(g, [](double a) { return cd(std::cos(a), std::sin(2 * a)); });
    Field z1 = Field::from_function(g, [](double a) { return 0.3 * std::exp(I * a); });
    Field z2 = Field::from_function(g, [](double a) { return cd(0.1 * std::cos(a)); });
    EXPECT_LT((expanded_hilbert(0, z1, z2, f) - flat_hilbert(f)).max_abs(), 1e-15);
    EXPECT_LT(expanded_hilbert(1, Field(g, 2.0), z2, f).max_abs(), 1e-13);
    EXPECT_THROW(expanded_hilbert(3, z1, z2, f), std::invalid_argument);
}

TEST(ExpandedHilbert, OperatorDifferenceScaling)
{
    std::vector<double> e = {0.16, 0.08, 0.04}, ratio;
    for (double eps : e) {
        PacketState p = build_packet(soliton_env(), eps, 0.0, fast(eps));
        const Field &f = p.zeta1;
        Field d = curve_hilbert(Curve::from_xi(p.xi_tilde), f) - approx_hilbert(eps, p.zeta1, p.zeta2, f);
        ratio.push_back(sobolev_norm(d, 4) / (wsinf_norm(f, 4) * std::pow(eps, 2.5)));
    }
    for (double r : ratio) EXPECT_LT(r, 1.0);
}

TEST(SelfCommutator, SuperPolynomialDecay)
{
    std::vector<double> norms;
    for (double eps : {0.4, 0.2, 0.1}) {
        const double L = 2 * pi * std::ceil(40 / eps / (2 * pi));
        const Grid g(1 << static_cast<int>(std::ceil(std::log2(L * 8 / (2 * pi)))), L);
        Field f = Field::from_function(g, [&](double a) { return std::exp(I * a) / std::cosh(eps * (a - L / 2)); });
        norms.push_back(sobolev_norm(flat_commutator(f, f), 0));
    }
    // successive ratios grow: faster than any fixed power
    EXPECT_GT(norms[1] / norms[2], 4.0 * norms[0] / norms[1]);
    EXPECT_LT(norms[2], 1e-5);
}

TEST(Residuals, VanishForZeroEnvelope)
{
    const double eps = 0.16;
    Envelope Z{Field(slow()), 0.0, car};
    PacketState p = build_packet(Z, eps, 0.0, fast(eps));
    EXPECT_EQ(residual_antihol(p).max_abs(), 0.0);
    EXPECT_EQ(residual_dt_antihol(p).max_abs(), 0.0);
    EXPECT_EQ(residual_b(p).max_abs(), 0.0);
    EXPECT_EQ(residual_bernoulli(p).max_abs(), 0.0);
    EXPECT_EQ(residual_neweuler({Z, eps, 0.0, fast(eps)}).max_abs(), 0.0);
}

TEST(Residuals, AntiholomorphySlope)
{
    std::vector<double> e = {0.04, 0.08, 0.16}, n;
    for (double eps : e) n.push_back(sobolev_norm(residual_antihol(build_packet(soliton_env(), eps, 0.0, fast(eps))), 4));
    OrderFit f = order_fit(e, n);
    EXPECT_NEAR(f.slope, 3.5, 0.3);
    EXPECT_GE(f.r_squared, 0.98);
}

TEST(Residuals, TranslationInvariance)
{
    const double eps = 0.16;
    const Grid g = fast(eps);
    const int s = 3;
    const double d = s * g.h();
    Envelope Bs = soliton_env();
    Bs.B = std::exp(I * car.k * d) * resample(soliton_env().B, slow(), eps * d);
    PacketState p = build_packet(soliton_env(), eps, 0.0, g);
    PacketState q = build_packet(Bs, eps, 0.0, g);
    EXPECT_LT((q.xi_tilde - cyclic_shift(p.xi_tilde, s)).max_abs(), 1e-12);
    EXPECT_LT(rel(sobolev_norm(residual_antihol(q), 4), sobolev_norm(residual_antihol(p), 4)), 1e-9);
    EXPECT_LT(rel(sobolev_norm(residual_b(q), 4), sobolev_norm(residual_b(p), 4)), 1e-9);
    EXPECT_LT(rel(sobolev_norm(residual_bernoulli(q), 4), sobolev_norm(residual_bernoulli(p), 4)), 1e-9);
}

TEST(Residuals, PhaseRotation)
{
    auto norms = [](double eps, double th) {
        Envelope Br = soliton_env();
        Br.B = std::exp(I * th) * Br.B;
        PacketState q = build_packet(Br, eps, 0.0, fast(eps));
        return std::vector<double>{sobolev_norm(residual_antihol(q), 4), sobolev_norm(residual_b(q), 4),
                                   sobolev_norm(residual_bernoulli(q), 4)};
    };
    const auto p0 = norms(0.16, 0.0), pi_rot = norms(0.16, pi);
    for (size_t i = 0; i < p0.size(); ++i) EXPECT_LT(rel(pi_rot[i], p0[i]), 1e-10);
    const auto q0 = norms(0.08, 0.0), q1 = norms(0.08, 1.1);
    for (size_t i = 0; i < q0.size(); ++i) EXPECT_LT(rel(q1[i], q0[i]), 0.02);
}

TEST(Residuals, NewEulerRefinement)
{
    const double eps = 0.16;
    ResidualOptions o;
    const double base = sobolev_norm(residual_neweuler({soliton_env(), eps, 0.0, fast(eps)}, o), 4);
    ResidualOptions half = o;
    half.dt = o.dt / 2;
    const double dt_half = sobolev_norm(residual_neweuler({soliton_env(), eps, 0.0, fast(eps)}, half), 4);
    const double n_double = sobolev_norm(residual_neweuler({soliton_env(), eps, 0.0, fast(eps, 2.0)}, o), 4);
    EXPECT_LT(rel(dt_half, base), 5e-3);
    EXPECT_LT(rel(n_double, base), 1e-2);
}

TEST(Residuals, EnvelopeNearbyIsSymmetricStep)
{
    Envelope B = gaussian_envelope(0.8, 2.0, car, Grid(256, 50.0));
    Envelope f = envelope_nearby(B, 1e-3);
    Envelope b = envelope_nearby(f, -1e-3);
    EXPECT_LT((b.B - B.B).max_abs(), 1e-13);
    EXPECT_NEAR(f.T - B.T, 1e-3, 1e-15);
}

TEST(ConvergenceCsv, HeaderAndRows)
{
    const auto path = std::filesystem::temp_directory_path() / "wwp_convergence_test.csv";
    write_convergence_csv({{"antihol", 0.04, 2048, 1e-4, 3.5, 0.99, "pass"}, {"antihol", 0.08, 1024, 1e-3, 3.5, 0.99, "pass"}},
                          path.string());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "equation_name,eps,N,norm,slope,r2,verdict");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2);
    std::filesystem::remove(path);
    EXPECT_EQ(residual_families.size(), 5u);
}
