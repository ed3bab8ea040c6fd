#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wwp/spectral.hpp"

namespace wwp {

struct Carrier {
    double k = 1.0;
    double omega = 1.0;
    double omega_prime = 0.5;
    double omega_double_prime = -0.25;
};

Carrier dispersion(double k);

struct Envelope {
    Field B;
    double T = 0.0;
    Carrier carrier;

    const Grid &grid() const { return B.grid; }
};

// 2i B_T - w'' B_XX + k^2 w B|B|^2 = 0, Strang split: linear half step, nonlinear rotation, linear half step.
// Negative dT steps backwards (the scheme is symmetric).
Envelope nls_step(const Envelope &B, double dT);
// n consecutive Strang steps with the adjacent linear half steps fused
Envelope nls_steps(const Envelope &B, long n, double dT);

double default_dT(const Grid &g, const Carrier &c);

double mass(const Envelope &B);
double hamiltonian(const Envelope &B);

// pointwise residual 2iB_T - w''B_XX + k^2 w B|B|^2 with B_T supplied
Field nls_residual(const Envelope &B, const Field &B_T);

struct SolitonParams {
    double eta = 1.0;
    double beta = 0.0;
    double sigma = 0.0;
    double center = 0.0;
};

SolitonParams soliton_params(double eta, const Carrier &c);

// eta sech(beta (X - L/2)) e^{i sigma T}
Envelope soliton(double eta, const Carrier &c, const Grid &g);
Envelope soliton_at(double eta, const Carrier &c, const Grid &g, double T);

// eta exp(-(X - L/2)^2 / 2 width^2)
Envelope gaussian_envelope(double eta, double width, const Carrier &c, const Grid &g);

class EnvelopeSource {
public:
    virtual ~EnvelopeSource() = default;
    virtual Envelope at(double T) = 0;
    virtual const Grid &grid() const = 0;
    virtual const Carrier &carrier() const = 0;
};

class SolitonSource : public EnvelopeSource {
public:
    SolitonSource(double eta, const Carrier &c, const Grid &g);
    Envelope at(double T) override;
    const Grid &grid() const override { return grid_; }
    const Carrier &carrier() const override { return carrier_; }

private:
    double eta_;
    Carrier carrier_;
    Grid grid_;
};

struct ConservationSample {
    double T;
    double mass;
    double hamiltonian;
};

// trajectory accessor with snapshot caching every cache_stride steps
class NlsTrajectory : public EnvelopeSource {
public:
    NlsTrajectory(Envelope B0, double dT, int cache_stride = 100);

    Envelope at(double T) override;
    const Grid &grid() const override { return B0_.grid(); }
    const Carrier &carrier() const override { return B0_.carrier; }

    // step forward to T_final, populating the cache and the conservation series
    void advance_to(double T_final);
    const std::vector<ConservationSample> &series() const { return series_; }
    double dT() const { return dT_; }

private:
    Envelope B0_;
    double dT_;
    int stride_;
    long last_step_ = 0;
    Envelope last_;
    std::map<long, Envelope> cache_;
    std::vector<ConservationSample> series_;
};

Envelope nls_solve(const Envelope &B0, double T_final, double dT);

void write_envelope_csv(const Envelope &B, const std::string &path);

}  // namespace wwp
