#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wwp/curveops.hpp"

using namespace wwp;

namespace {

Field bump_xi(const Grid &g, double amp = 0.1)
{
    return Field::from_function(g, [&](double a) { return amp * I * std::exp(I * (2 * pi / g.length) * a); });
}

Field smooth_mean_zero(const Grid &g)
{
    const double k0 = 2 * pi / g.length;
    return Field::from_function(g, [&](double a) { return std::exp(2.0 * I * k0 * a) / (1.2 + std::cos(k0 * a)) + cd(std::sin(k0 * a)); });
}

// trace of a function holomorphic below the curve and decaying at depth: poles above the curve
Field holo_trace(const Grid &g, const Field &gamma, double height = 1.0)
{
    const double a = pi / g.length;
    const cd z0(0.0, height), z1(g.length / 2, height);
    Field f(g);
    for (int j = 0; j < g.n; ++j) f.v[j] = a / std::tan(a * (gamma.v[j] - z0)) - a / std::tan(a * (gamma.v[j] - z1));
    return f;
}

}  // namespace

TEST(CurveHilbert, FlatCurveMatchesFlatHilbert)
{
    const Grid g(256, 2 * pi);
    Curve c = Curve::flat(g);
    Field e = Field::from_function(g, [](double a) { return std::exp(I * a); });
    EXPECT_LT((curve_hilbert(c, e) + e).max_abs(), 1e-10);
    Field f = smooth_mean_zero(g);
    EXPECT_LT((curve_hilbert(c, f) - flat_hilbert(f)).max_abs(), 1e-10);
    EXPECT_LT((curve_hilbert(c, f, Quadrature::desingularized) - flat_hilbert(f)).max_abs(), 1e-10);
}

TEST(CurveHilbert, ConstantsMapToZero)
{
    const Grid g(256, 2 * pi);
    CurveKernel k(Curve::from_xi(bump_xi(g)));
    EXPECT_LT(curve_hilbert(k, Field(g, 1.0)).max_abs(), 1e-10);
}

TEST(CurveHilbert, SquaresToIdentity)
{
    const Grid g(256, 2 * pi);
    CurveKernel k(Curve::from_xi(bump_xi(g)));
    Field f = smooth_mean_zero(g);
    Field r = curve_hilbert(k, curve_hilbert(k, f)) - f;
    EXPECT_LT((r - r.v[0]).max_abs(), 1e-8);
}

TEST(CurveHilbert, SpectralConvergence)
{
    std::vector<double> err;
    for (int n : {16, 32, 64, 128}) {
        const Grid g(n, 2 * pi);
        Curve c = Curve::from_xi(bump_xi(g));
        Field f = holo_trace(g, c.gamma, 1.0);
        err.push_back((curve_hilbert(c, f) - f).max_abs());
    }
    EXPECT_GT(err[0] / err[1], 1e2);
    EXPECT_LT(err[3], 1e-10);
}

TEST(CurveHilbert, ChordArcViolationReported)
{
    const Grid g(128, 2 * pi);
    Field xi = Field::from_function(g, [](double a) { return cd(-1.5 * std::sin(a), 0.0); });
    Curve c = Curve::from_xi(xi);
    try {
        require_chord_arc(c);
        FAIL() << "expected a chord-arc error";
    } catch (const ChordArcError &e) {
        EXPECT_GE(e.j, 0);
        EXPECT_GE(e.k, 0);
    }
    EXPECT_NO_THROW(require_chord_arc(Curve::from_xi(bump_xi(g))));
}

TEST(CurveHilbert, TranslationEquivariance)
{
    const Grid g(128, 2 * pi);
    Field xi = bump_xi(g, 0.15) + 0.05 * Field::from_function(g, [](double a) { return cd(std::cos(3 * a)); });
    Field f = smooth_mean_zero(g);
    Field r = curve_hilbert(Curve::from_xi(xi), f);
    for (int s : {5, 64}) {
        Field rs = curve_hilbert(Curve::from_xi(cyclic_shift(xi, s)), cyclic_shift(f, s));
        EXPECT_LT((rs - cyclic_shift(r, s)).max_abs(), 1e-12);
    }
}

TEST(Commutator, Examples)
{
    const Grid g(128, 2 * pi);
    CurveKernel k(Curve::from_xi(bump_xi(g)));
    Field f = smooth_mean_zero(g);
    EXPECT_LT(commutator(k, Field(g, 3.0), f).max_abs(), 1e-12);
    // g = gamma: kernel is identically one
    EXPECT_LT(commutator(k, k.curve().xi, f, false, 1.0).max_abs(), 1e-10);

    Curve flat = Curve::flat(g);
    Field e = Field::from_function(g, [](double a) { return std::exp(I * a); });
    Field brute = e * flat_hilbert(derivative(e, 1)) - flat_hilbert(e * derivative(e, 1));
    EXPECT_LT(commutator(flat, e, e).max_abs(), 1e-10);
    EXPECT_LT(brute.max_abs(), 1e-12);
}

TEST(Commutator, FlatMatchesBruteForce)
{
    const Grid g(128, 2 * pi);
    Curve flat = Curve::flat(g);
    Field a = Field::from_function(g, [](double x) { return cd(std::cos(x), 0.3 * std::sin(2 * x)); });
    Field f = smooth_mean_zero(g);
    Field brute = a * flat_hilbert(derivative(f, 1)) - flat_hilbert(a * derivative(f, 1));
    EXPECT_LT((commutator(flat, a, f) - brute).max_abs(), 1e-10);
}

TEST(SingularIntegrals, Reductions)
{
    const Grid g(128, 2 * pi);
    CurveKernel flat(Curve::flat(g));
    Field f = smooth_mean_zero(g);
    EXPECT_LT((s1_apply(flat, {}, f) - (pi * I) * flat_hilbert(f)).max_abs(), 1e-10);
    CurveKernel k(Curve::from_xi(bump_xi(g)));
    EXPECT_LT(s2_apply(k, {Field(g, 2.0), Field(g, -1.0)}, f).max_abs(), 1e-12);
}

TEST(SingularIntegrals, S2BoundRandomized)
{
    const Grid g(256, 2 * pi);
    CurveKernel k(Curve::from_xi(bump_xi(g)));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        cvec ca(g.n), cf(g.n);
        for (int j = 0; j < g.n; ++j) {
            const double m = g.mode(j);
            const double w = std::exp(-m * m / 32.0);
            ca[j] = cd(nd(rng), nd(rng)) * w;
            cf[j] = cd(nd(rng), nd(rng)) * w;
        }
        Field A = ifft(g, ca).real(), f = ifft(g, cf);
        worst = std::max(worst, l2_norm(s2_apply(k, {A}, f)) / (sup_norm(derivative(A, 1)) * l2_norm(f)));
    }
    EXPECT_LE(worst, 50.0);
}

TEST(CurveHilbert, CommutatorOfEigenfunctionsVanishes)
{
    const Grid g(256, 2 * pi);
    CurveKernel k(Curve::from_xi(bump_xi(g)));
    const Field &gamma = k.curve().gamma;
    Field f = holo_trace(g, gamma);
    Field h = holo_trace(g, gamma, 1.3) * holo_trace(g, gamma, 0.8);
    EXPECT_LT((curve_hilbert(k, f) - f).max_abs(), 1e-8);
    EXPECT_LT((curve_hilbert(k, h) - h).max_abs(), 1e-8);
    Field comm = f * curve_hilbert(k, h) - curve_hilbert(k, f * h);
    EXPECT_LT(comm.max_abs(), 1e-8);
}

TEST(SolveRealPart, Examples)
{
    const Grid g(128, 2 * pi);
    Field rhs = Field::from_function(g, [](double a) { return cd(std::cos(a) + 0.2, std::sin(3 * a)); });
    CurveKernel flat(Curve::flat(g));
    RealSolve r = solve_real_part(flat, rhs);
    EXPECT_LT((r.f - rhs.real()).max_abs(), 1e-12);
    EXPECT_LE(r.iterations, 2);

    CurveKernel k(Curve::from_xi(bump_xi(g)));
    EXPECT_EQ(solve_real_part(k, Field(g)).f.max_abs(), 0.0);
    Field truth = Field::from_function(g, [](double a) { return cd(std::exp(std::sin(a)) - 1.0, 0.0); });
    Field made = truth - curve_hilbert(k, truth);
    EXPECT_LT((solve_real_part(k, made).f - truth).max_abs(), 1e-10);
}

TEST(Kernel, PeriodizedPowers)
{
    const double a = 0.5;
    const cd z(0.3, 0.2);
    const cd s = std::sin(a * z);
    EXPECT_LT(std::abs(periodized_power(a / std::tan(a * z), a, 2) - a * a / (s * s)), 1e-13);
    EXPECT_THROW(periodized_power(z, a, 9), std::invalid_argument);
}
