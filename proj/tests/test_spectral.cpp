#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "wwp/spectral.hpp"

using namespace wwp;

namespace {

Grid g2pi(int n = 64) { return Grid(n, 2.0 * pi); }

Field mode(const Grid &g, int m)
{
    return Field::from_function(g, [&](double a) { return std::exp(I * (2.0 * pi * m / g.length) * a); });
}

double maxdiff(const Field &a, const Field &b) { return (a - b).max_abs(); }

}  // namespace

TEST(FourierMultiplier, IdentitySymbol)
{
    const Grid g = g2pi();
    Field f = Field::from_function(g, [](double a) { return cd(std::sin(3 * a), std::cos(a) * std::cos(a)); });
    EXPECT_LT(maxdiff(fourier_multiplier(f, [](double) { return cd(1.0); }), f), 1e-14);
}

TEST(FourierMultiplier, DerivativeSymbolOnMode)
{
    const Grid g = g2pi();
    Field r = fourier_multiplier(mode(g, 1), [](double x) { return I * x; });
    EXPECT_LT(maxdiff(r, I * mode(g, 1)), 1e-13);
}

TEST(FourierMultiplier, HalfPowerSymbol)
{
    const Grid g = g2pi();
    Field r = fourier_multiplier(mode(g, 2), [](double x) { return cd(std::sqrt(std::abs(x))); });
    EXPECT_LT(maxdiff(r, std::sqrt(2.0) * mode(g, 2)), 1e-13);
}

TEST(FourierMultiplier, RejectsNonFinite)
{
    const Grid g = g2pi(16);
    Field f(g, 1.0);
    f.v[3] = cd(std::numeric_limits<double>::quiet_NaN(), 0.0);
    EXPECT_THROW(fourier_multiplier(f, [](double) { return cd(1.0); }), std::domain_error);
}

TEST(FlatHilbert, Examples)
{
    const Grid g = g2pi();
    EXPECT_LT(maxdiff(flat_hilbert(mode(g, 1)), -1.0 * mode(g, 1)), 1e-14);
    EXPECT_LT(flat_hilbert(Field(g, 1.0)).max_abs(), 1e-15);
    Field c = Field::from_function(g, [](double a) { return cd(std::cos(a)); });
    Field s = Field::from_function(g, [](double a) { return -I * std::sin(a); });
    EXPECT_LT(maxdiff(flat_hilbert(c), s), 1e-14);
}

TEST(FlatHilbert, ExactOnEveryMode)
{
    const Grid g = g2pi(128);
    double worst = 0.0;
    for (int m = -63; m <= 63; ++m) {
        const double sgn = m > 0 ? 1.0 : (m < 0 ? -1.0 : 0.0);
        worst = std::max(worst, maxdiff(flat_hilbert(mode(g, m)), -sgn * mode(g, m)));
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(ConjFlatHilbert, Examples)
{
    const Grid g = g2pi();
    EXPECT_LT(maxdiff(conj_flat_hilbert(mode(g, 1)), mode(g, 1)), 1e-14);
    EXPECT_LT(conj_flat_hilbert(Field(g, 2.5)).max_abs(), 1e-15);
    EXPECT_LT(maxdiff(conj_flat_hilbert(mode(g, -1)), -1.0 * mode(g, -1)), 1e-14);
}

TEST(ConjFlatHilbert, IsConjugatedFlatHilbert)
{
    const Grid g = g2pi(64);
    Field f = Field::from_function(g, [](double a) { return cd(std::exp(std::sin(a)), std::cos(2 * a) + 0.3); });
    EXPECT_LT(maxdiff(conj_flat_hilbert(f), flat_hilbert(f.conj()).conj()), 1e-15);
}

TEST(FlatHilbert, InvolutionOnMeanZero)
{
    const Grid g = g2pi(128);
    Field f = Field::from_function(g, [](double a) { return cd(std::exp(std::cos(a)), std::sin(3 * a)); });
    f = f - cd(mean(f), integral(f).imag() / g.length);
    Field ff = flat_hilbert(flat_hilbert(f));
    EXPECT_LT(maxdiff(ff, f), 1e-12);
}

TEST(Derivative, Examples)
{
    const Grid g = g2pi();
    EXPECT_LT(maxdiff(derivative(mode(g, 2), 1), 2.0 * I * mode(g, 2)), 1e-13);
    EXPECT_LT(half_derivative(Field(g, 4.0)).max_abs(), 1e-15);
    Field s = Field::from_function(g, [](double a) { return cd(std::sin(a)); });
    EXPECT_LT(maxdiff(derivative(s, 2), -1.0 * s), 1e-12);
    EXPECT_THROW(derivative(s, -1), std::invalid_argument);
}

TEST(SobolevNorm, Examples)
{
    const Grid g = g2pi();
    EXPECT_EQ(sobolev_norm(Field(g), 3.0), 0.0);
    EXPECT_NEAR(sobolev_norm(mode(g, 1), 0.0), std::sqrt(2 * pi), 1e-13);
    EXPECT_NEAR(sobolev_norm(mode(g, 1), 1.0), std::sqrt(2 * 2 * pi), 1e-13);
    EXPECT_NEAR(sobolev_norm(Field(g, 1.0), 5.0), std::sqrt(2 * pi), 1e-13);
    EXPECT_NEAR(sup_norm(3.0 * mode(g, 4)), 3.0, 1e-13);
}

TEST(SobolevNorm, ParsevalConsistency)
{
    const Grid g(128, 10.0);
    Field f = Field::from_function(g, [&](double a) { return cd(std::sin(2 * pi * a / 10.0) * std::exp(std::cos(2 * pi * a / 10.0))); });
    f = f - cd(mean(f));
    const double lhs = std::pow(sobolev_norm(f, 0), 2) + std::pow(sobolev_norm(derivative(f, 1), 0), 2);
    EXPECT_NEAR(lhs, std::pow(sobolev_norm(f, 1), 2), 1e-12 * lhs);
}

TEST(Projections, Examples)
{
    const Grid g = g2pi();
    auto [m1, p1] = projections(mode(g, 1));
    EXPECT_LT(maxdiff(m1, mode(g, 1)), 1e-15);
    EXPECT_LT(p1.max_abs(), 1e-15);
    auto [m2, p2] = projections(mode(g, -1));
    EXPECT_LT(m2.max_abs(), 1e-15);
    EXPECT_LT(maxdiff(p2, mode(g, -1)), 1e-15);
    auto [m3, p3] = projections(Field(g, 1.0));
    EXPECT_LT(maxdiff(m3, Field(g, 0.5)), 1e-15);
    EXPECT_LT(maxdiff(p3, Field(g, 0.5)), 1e-15);
}

TEST(Projections, SumReproducesField)
{
    const Grid g(96, 7.0);
    Field f = Field::from_function(g, [](double a) { return cd(std::cos(a * 0.9), std::sin(a * 2.7)); });
    auto [m, p] = projections(f);
    EXPECT_LT(maxdiff(m + p, f), 1e-14);
}

// upper bound of the conjugate flat Hilbert defect on a slowly modulated carrier
TEST(ConjFlatHilbert, ModulatedCarrierBound)
{
    const double s = 4.0;
    double worst = 0.0;
    for (double eps : {0.05, 0.1, 0.2}) {
        const int periods = static_cast<int>(std::ceil(64.0 / eps / (2 * pi)));
        const double L = 2 * pi * periods;
        const Grid g(16 * (periods / 2 + 1), L);
        Field env = Field::from_function(g, [&](double a) { return cd(1.0 / std::cosh(eps * (a - L / 2))); });
        Field f = env * Field::from_function(g, [](double a) { return std::exp(I * a); });
        const double defect = sobolev_norm(conj_flat_hilbert(f) - f, s);
        for (int m = 1; m <= 4; ++m) {
            const double bound = std::pow(eps, m - 0.5) * sobolev_norm(env, s + m);
            worst = std::max(worst, defect / bound);
        }
    }
    EXPECT_LE(worst, 10.0);
}

TEST(KrasnyFilter, ZerosSmallModes)
{
    const Grid g = g2pi(32);
    Field f = mode(g, 1) + 1e-15 * mode(g, 5);
    Field r = krasny_filter(f, 1e-13);
    EXPECT_LT(maxdiff(r, mode(g, 1)), 1e-15);
    EXPECT_LT(maxdiff(krasny_filter(f, 0.0), f), 1e-15);
}

TEST(Spectral, TranslationEquivariance)
{
    const Grid g(64, 12.0);
    Field f = Field::from_function(g, [](double a) { return cd(std::exp(std::sin(2 * pi * a / 12.0)), std::cos(4 * pi * a / 12.0)); });
    for (int sh : {1, 7, 33}) {
        EXPECT_LT(maxdiff(flat_hilbert(cyclic_shift(f, sh)), cyclic_shift(flat_hilbert(f), sh)), 1e-13);
        EXPECT_LT(maxdiff(derivative(cyclic_shift(f, sh), 2), cyclic_shift(derivative(f, 2), sh)), 1e-12);
    }
}

TEST(Spectral, InterpolationAndResample)
{
    const Grid g(32, 2 * pi);
    Field f = Field::from_function(g, [](double a) { return cd(std::sin(3 * a), std::cos(a)); });
    const cvec c = fft(f);
    EXPECT_LT(std::abs(interpolate(c, g, 0.3) - cd(std::sin(0.9), std::cos(0.3))), 1e-13);
    EXPECT_LT(std::abs(interpolate_derivative(c, g, 0.3) - cd(3 * std::cos(0.9), -std::sin(0.3))), 1e-12);
    Field r = resample(f, Grid(64, 2 * pi), 0.1);
    Field exact = Field::from_function(Grid(64, 2 * pi), [](double a) { return cd(std::sin(3 * (a + 0.1)), std::cos(a + 0.1)); });
    EXPECT_LT(maxdiff(r, exact), 1e-13);
}
