#include <gtest/gtest.h>

#include <cmath>

#include "wwp/curveops.hpp"
#include "wwp/nls.hpp"
#include "wwp/residual.hpp"

using namespace wwp;

TEST(Dispersion, ClosedForms)
{
    Carrier c = dispersion(1.0);
    EXPECT_DOUBLE_EQ(c.omega, 1.0);
    EXPECT_DOUBLE_EQ(c.omega_prime, 0.5);
    EXPECT_DOUBLE_EQ(c.omega_double_prime, -0.25);
    c = dispersion(4.0);
    EXPECT_DOUBLE_EQ(c.omega, 2.0);
    EXPECT_DOUBLE_EQ(c.omega_prime, 0.25);
    EXPECT_DOUBLE_EQ(c.omega_double_prime, -1.0 / 32.0);
    c = dispersion(2.0);
    EXPECT_NEAR(c.omega * c.omega - 2.0, 0.0, 1e-15);
    EXPECT_LT(dispersion(0.37).omega_double_prime, 0.0);
    EXPECT_THROW(dispersion(0.0), std::domain_error);
    EXPECT_THROW(dispersion(-1.0), std::domain_error);
}

TEST(NlsStep, ZeroStaysZero)
{
    const Grid g(64, 20.0);
    Envelope B{Field(g), 0.0, dispersion(1.0)};
    Envelope r = nls_solve(B, 1.0, 1e-2);
    EXPECT_EQ(r.B.max_abs(), 0.0);
}

TEST(NlsStep, ConstantEnvelopeRotates)
{
    const Grid g(32, 10.0);
    const Carrier car = dispersion(1.7);
    const cd c(0.4, -0.3);
    Envelope B{Field(g, c), 0.0, car};
    const double T = 2.0;
    Envelope r = nls_solve(B, T, 1e-3);
    const cd exact = c * std::exp(I * car.k * car.k * car.omega * std::norm(c) * T / 2.0);
    EXPECT_LT((r.B - exact).max_abs(), 1e-12);
}

TEST(Soliton, Parameters)
{
    SolitonParams p = soliton_params(1.0, dispersion(1.0));
    EXPECT_NEAR(p.beta, std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(p.sigma, 0.25, 1e-15);
}

TEST(Soliton, PointwiseResidual)
{
    const Carrier car = dispersion(1.0);
    const Grid g(1024, 100.0);
    for (double eta : {0.5, 1.0}) {
        Envelope B = soliton(eta, car, g);
        const double sigma = soliton_params(eta, car).sigma;
        EXPECT_LT(nls_residual(B, I * sigma * B.B).max_abs(), 1e-10);
    }
}

TEST(Soliton, MassMatchesSechIntegral)
{
    const Carrier car = dispersion(1.0);
    const Grid g(1024, 100.0);
    const double eta = 0.5;
    Envelope B = soliton(eta, car, g);
    const double beta = soliton_params(eta, car).beta;
    EXPECT_NEAR(mass(B), 2.0 * eta * eta / beta, 1e-12);
}

TEST(Soliton, TailsTooLargeRejected)
{
    EXPECT_THROW(soliton(0.5, dispersion(1.0), Grid(256, 30.0)), ConfigError);
}

TEST(NlsSolve, ZeroFinalTimeIsIdentity)
{
    Envelope B = soliton(1.0, dispersion(1.0), Grid(256, 50.0));
    Envelope r = nls_solve(B, 0.0, 1e-3);
    EXPECT_EQ((r.B - B.B).max_abs(), 0.0);
}

TEST(NlsSolve, SolitonAccuracyAndMass)
{
    const Carrier car = dispersion(1.0);
    const Grid g(1024, 100.0);
    Envelope B0 = soliton(0.5, car, g);
    Envelope B = nls_solve(B0, 5.0, 1e-3);
    EXPECT_LT(l2_norm(B.B - soliton_at(0.5, car, g, 5.0).B), 1e-8);
    EXPECT_LT(std::abs(mass(B) - mass(B0)), 1e-12);
}

TEST(NlsSolve, StrangSecondOrder)
{
    const Carrier car = dispersion(1.0);
    const Grid g(1024, 100.0);
    Envelope B0 = soliton(0.5, car, g);
    const Envelope exact = soliton_at(0.5, car, g, 5.0);
    std::vector<double> dts = {1e-3, 2e-3, 4e-3}, errs;
    for (double dT : dts) errs.push_back(l2_norm(nls_solve(B0, 5.0, dT).B - exact.B));
    EXPECT_NEAR(order_fit(dts, errs).slope, 2.0, 0.1);
}

TEST(NlsSolve, HamiltonianDriftQuarteredByHalving)
{
    const Carrier car = dispersion(1.0);
    Envelope B0 = gaussian_envelope(0.8, 2.0, car, Grid(512, 50.0));
    const double h0 = hamiltonian(B0);
    const double d1 = std::abs(hamiltonian(nls_solve(B0, 2.0, 2e-3)) - h0);
    const double d2 = std::abs(hamiltonian(nls_solve(B0, 2.0, 1e-3)) - h0);
    EXPECT_NEAR(d1 / d2, 4.0, 0.2);
}

TEST(NlsSolve, BackwardStepsInvert)
{
    Envelope B0 = gaussian_envelope(0.8, 2.0, dispersion(1.0), Grid(256, 50.0));
    Envelope f = nls_steps(B0, 50, 1e-2);
    Envelope b = nls_steps(f, 50, -1e-2);
    EXPECT_LT((b.B - B0.B).max_abs(), 1e-12);
}

TEST(NlsTrajectory, MatchesDirectSolve)
{
    const Carrier car = dispersion(1.0);
    Envelope B0 = gaussian_envelope(0.8, 2.0, car, Grid(256, 50.0));
    NlsTrajectory tr(B0, 1e-3, 50);
    Envelope a = tr.at(0.73);
    Envelope b = tr.at(0.21);
    EXPECT_LT((a.B - nls_solve(B0, 0.73, 1e-3).B).max_abs(), 1e-12);
    EXPECT_LT((b.B - nls_solve(B0, 0.21, 1e-3).B).max_abs(), 1e-12);
    tr.advance_to(1.0);
    ASSERT_FALSE(tr.series().empty());
    for (const auto &s : tr.series()) EXPECT_NEAR(s.mass, mass(B0), 1e-12);
}

TEST(NlsTrajectory, SolitonSourceIsExact)
{
    const Carrier car = dispersion(1.0);
    const Grid g(512, 50.0);
    SolitonSource src(1.0, car, g);
    EXPECT_LT((src.at(1.3).B - soliton_at(1.0, car, g, 1.3).B).max_abs(), 1e-15);
}

TEST(DefaultDT, Bounded)
{
    const Grid g(1024, 100.0);
    const Carrier car = dispersion(1.0);
    const double h = g.h();
    EXPECT_DOUBLE_EQ(default_dT(g, car), std::min(1e-3, h * h / 0.25 / 10.0));
}
