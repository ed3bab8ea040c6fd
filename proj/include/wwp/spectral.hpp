#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace wwp {

using cd = std::complex<double>;
using cvec = std::vector<cd>;
using rvec = std::vector<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cd I{0.0, 1.0};

class RegimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Grid {
    int n = 0;
    double length = 0.0;

    Grid() = default;
    Grid(int n_points, double L);

    double h() const { return length / n; }
    double node(int j) const { return j * length / n; }
    // signed integer mode for FFT slot j
    int mode(int j) const { return j <= n / 2 ? j : j - n; }
    double wavenumber(int j) const { return 2.0 * pi * mode(j) / length; }
    bool operator==(const Grid &o) const { return n == o.n && length == o.length; }
    bool operator!=(const Grid &o) const { return !(*this == o); }
};

class Field {
public:
    Grid grid;
    cvec v;

    Field() = default;
    explicit Field(const Grid &g, cd value = 0.0) : grid(g), v(g.n, value) {}
    Field(const Grid &g, cvec samples);

    template <class F>
    static Field from_function(const Grid &g, F &&f)
    {
        Field out(g);
        for (int j = 0; j < g.n; ++j) out.v[j] = f(g.node(j));
        return out;
    }

    int size() const { return grid.n; }
    cd &operator[](int j) { return v[j]; }
    const cd &operator[](int j) const { return v[j]; }

    Field &operator+=(const Field &o);
    Field &operator-=(const Field &o);
    Field &operator*=(const Field &o);
    Field &operator*=(cd s);

    Field conj() const;
    Field real() const;
    Field imag() const;
    double max_abs() const;
    double max_imag() const;
    bool finite() const;
};

Field operator+(Field a, const Field &b);
Field operator-(Field a, const Field &b);
Field operator*(Field a, const Field &b);
Field operator*(Field a, cd s);
Field operator*(cd s, Field a);
Field operator+(Field a, cd s);
Field operator-(Field a, cd s);
Field operator+(cd s, Field a);
Field operator-(cd s, Field a);
Field operator-(Field a);

void check_same_grid(const Field &a, const Field &b, const char *where);

// forward and inverse transforms; forward is normalized by 1/n
cvec fft(const Field &f);
Field ifft(const Grid &g, const cvec &coef);

using Symbol = std::function<cd(double)>;

// per-slot multiplier, receives the wavenumber xi_m; nyquist slot is zeroed when odd is set
Field fourier_multiplier(const Field &f, const Symbol &symbol, bool odd = false);

Field flat_hilbert(const Field &f);
Field conj_flat_hilbert(const Field &f);
Field derivative(const Field &f, int order = 1);
Field half_derivative(const Field &f);

double sobolev_norm(const Field &f, double s);
double sup_norm(const Field &f);
// max over orders 0..s of sup|d^j f|
double wsinf_norm(const Field &f, int s);

// (1/2)(I - H0) f and (1/2)(I + H0) f
std::pair<Field, Field> projections(const Field &f);

// zero every mode whose magnitude is below floor * max
Field krasny_filter(const Field &f, double floor = 1e-13);

double mean(const Field &f);
cd integral(const Field &f);
double l2_inner_real(const Field &a, const Field &b);

// band-limited interpolant of f evaluated at arbitrary points
cd interpolate(const cvec &coef, const Grid &g, double x);
cd interpolate_derivative(const cvec &coef, const Grid &g, double x);

// resample a periodic field from its grid onto a finer grid of equal length via zero padding,
// after translating by shift (result(x) = f(x + shift))
Field resample(const Field &f, const Grid &target, double shift = 0.0);

Field cyclic_shift(const Field &f, int s);

}  // namespace wwp
