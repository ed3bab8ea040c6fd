#include "wwp/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace wwp {

namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// plans are created with unaligned buffers so they can be reused through the new-array execute calls
const PlanPair &plans_for(int n)
{
    static std::mutex mtx;
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    cvec a(n), b(n);
    auto *pa = reinterpret_cast<fftw_complex *>(a.data());
    auto *pb = reinterpret_cast<fftw_complex *>(b.data());
    PlanPair p;
    p.forward = fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.backward = fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

void require_finite(const Field &f, const char *where)
{
    for (int j = 0; j < f.size(); ++j) {
        if (!std::isfinite(f.v[j].real()) || !std::isfinite(f.v[j].imag())) {
            std::ostringstream os;
            os << where << ": non-finite sample at node " << j;
            throw std::domain_error(os.str());
        }
    }
}

}  // namespace

Grid::Grid(int n_points, double L) : n(n_points), length(L)
{
    if (n_points < 2 || n_points % 2 != 0) throw ConfigError("grid: n_points must be a positive even integer");
    if (!(L > 0.0)) throw ConfigError("grid: length must be positive");
}

Field::Field(const Grid &g, cvec samples) : grid(g), v(std::move(samples))
{
    if (static_cast<int>(v.size()) != g.n) throw std::invalid_argument("field: sample count does not match grid");
}

void check_same_grid(const Field &a, const Field &b, const char *where)
{
    if (a.grid != b.grid) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

Field &Field::operator+=(const Field &o)
{
    check_same_grid(*this, o, "add");
    for (int j = 0; j < size(); ++j) v[j] += o.v[j];
    return *this;
}

Field &Field::operator-=(const Field &o)
{
    check_same_grid(*this, o, "subtract");
    for (int j = 0; j < size(); ++j) v[j] -= o.v[j];
    return *this;
}

Field &Field::operator*=(const Field &o)
{
    check_same_grid(*this, o, "multiply");
    for (int j = 0; j < size(); ++j) v[j] *= o.v[j];
    return *this;
}

Field &Field::operator*=(cd s)
{
    for (auto &x : v) x *= s;
    return *this;
}

Field Field::conj() const
{
    Field out(*this);
    for (auto &x : out.v) x = std::conj(x);
    return out;
}

Field Field::real() const
{
    Field out(*this);
    for (auto &x : out.v) x = x.real();
    return out;
}

Field Field::imag() const
{
    Field out(*this);
    for (auto &x : out.v) x = x.imag();
    return out;
}

double Field::max_abs() const
{
    double m = 0.0;
    for (auto &x : v) m = std::max(m, std::abs(x));
    return m;
}

double Field::max_imag() const
{
    double m = 0.0;
    for (auto &x : v) m = std::max(m, std::abs(x.imag()));
    return m;
}

bool Field::finite() const
{
    for (auto &x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

Field operator+(Field a, const Field &b) { return a += b; }
Field operator-(Field a, const Field &b) { return a -= b; }
Field operator*(Field a, const Field &b) { return a *= b; }
Field operator*(Field a, cd s) { return a *= s; }
Field operator*(cd s, Field a) { return a *= s; }

Field operator+(Field a, cd s)
{
    for (auto &x : a.v) x += s;
    return a;
}

Field operator-(Field a, cd s)
{
    for (auto &x : a.v) x -= s;
    return a;
}

Field operator+(cd s, Field a) { return std::move(a) + s; }

Field operator-(cd s, Field a)
{
    for (auto &x : a.v) x = s - x;
    return a;
}

Field operator-(Field a)
{
    for (auto &x : a.v) x = -x;
    return a;
}

cvec fft(const Field &f)
{
    const int n = f.size();
    cvec out(n);
    const auto &p = plans_for(n);
    fftw_execute_dft(p.forward, reinterpret_cast<fftw_complex *>(const_cast<cd *>(f.v.data())),
                     reinterpret_cast<fftw_complex *>(out.data()));
    const double s = 1.0 / n;
    for (auto &x : out) x *= s;
    return out;
}

Field ifft(const Grid &g, const cvec &coef)
{
    Field out(g);
    cvec in(coef);
    const auto &p = plans_for(g.n);
    fftw_execute_dft(p.backward, reinterpret_cast<fftw_complex *>(in.data()),
                     reinterpret_cast<fftw_complex *>(out.v.data()));
    return out;
}

Field fourier_multiplier(const Field &f, const Symbol &symbol, bool odd)
{
    require_finite(f, "fourier_multiplier");
    const Grid &g = f.grid;
    cvec c = fft(f);
    for (int j = 0; j < g.n; ++j) c[j] *= symbol(g.wavenumber(j));
    if (odd) c[g.n / 2] = 0.0;
    return ifft(g, c);
}

namespace {

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

template <class F>
Field apply_slots(const Field &f, F &&mult)
{
    const Grid &g = f.grid;
    cvec c = fft(f);
    for (int j = 0; j < g.n; ++j) c[j] *= mult(j);
    return ifft(g, c);
}

}  // namespace

Field flat_hilbert(const Field &f)
{
    const Grid &g = f.grid;
    return apply_slots(f, [&g](int j) -> cd { return j == g.n / 2 ? 0.0 : -sgn(g.mode(j)); });
}

Field conj_flat_hilbert(const Field &f)
{
    const Grid &g = f.grid;
    return apply_slots(f, [&g](int j) -> cd { return j == g.n / 2 ? 0.0 : sgn(g.mode(j)); });
}

Field derivative(const Field &f, int order)
{
    if (order < 0) throw std::invalid_argument("derivative: negative order");
    if (order == 0) return f;
    const Grid &g = f.grid;
    return apply_slots(f, [&g, order](int j) -> cd {
        if (j == g.n / 2 && order % 2 == 1) return 0.0;
        return std::pow(I * g.wavenumber(j), order);
    });
}

Field half_derivative(const Field &f)
{
    const Grid &g = f.grid;
    return apply_slots(f, [&g](int j) -> cd { return std::sqrt(std::abs(g.wavenumber(j))); });
}

double sobolev_norm(const Field &f, double s)
{
    const Grid &g = f.grid;
    cvec c = fft(f);
    double acc = 0.0;
    for (int j = 0; j < g.n; ++j) {
        const double xi = g.wavenumber(j);
        acc += std::pow(1.0 + xi * xi, s) * std::norm(c[j]);
    }
    return std::sqrt(acc * g.length);
}

double sup_norm(const Field &f) { return f.max_abs(); }

double wsinf_norm(const Field &f, int s)
{
    double m = sup_norm(f);
    Field d = f;
    for (int j = 1; j <= s; ++j) {
        d = derivative(d, 1);
        m = std::max(m, sup_norm(d));
    }
    return m;
}

std::pair<Field, Field> projections(const Field &f)
{
    Field h = flat_hilbert(f);
    return {0.5 * (f - h), 0.5 * (f + h)};
}

Field krasny_filter(const Field &f, double floor)
{
    if (floor <= 0.0) return f;
    cvec c = fft(f);
    double m = 0.0;
    for (auto &x : c) m = std::max(m, std::abs(x));
    const double cut = floor * m;
    for (auto &x : c)
        if (std::abs(x) < cut) x = 0.0;
    return ifft(f.grid, c);
}

double mean(const Field &f)
{
    double s = 0.0;
    for (auto &x : f.v) s += x.real();
    return s / f.size();
}

cd integral(const Field &f)
{
    cd s = 0.0;
    for (auto &x : f.v) s += x;
    return s * f.grid.h();
}

double l2_inner_real(const Field &a, const Field &b)
{
    check_same_grid(a, b, "inner");
    double s = 0.0;
    for (int j = 0; j < a.size(); ++j) s += (a.v[j] * std::conj(b.v[j])).real();
    return s * a.grid.h();
}

cd interpolate(const cvec &coef, const Grid &g, double x)
{
    cd s = 0.0;
    const double base = 2.0 * pi * x / g.length;
    for (int j = 0; j < g.n; ++j) {
        if (j == g.n / 2) {
            s += coef[j] * std::cos(base * j);
            continue;
        }
        s += coef[j] * std::polar(1.0, base * g.mode(j));
    }
    return s;
}

cd interpolate_derivative(const cvec &coef, const Grid &g, double x)
{
    cd s = 0.0;
    const double base = 2.0 * pi * x / g.length;
    for (int j = 0; j < g.n; ++j) {
        if (j == g.n / 2) continue;
        s += coef[j] * I * g.wavenumber(j) * std::polar(1.0, base * g.mode(j));
    }
    return s;
}

Field resample(const Field &f, const Grid &target, double shift)
{
    const Grid &g = f.grid;
    if (std::abs(target.length - g.length) > 1e-12 * g.length)
        throw std::invalid_argument("resample: domain lengths differ");
    if (target.n < g.n) throw std::invalid_argument("resample: target grid must not be coarser");
    cvec c = fft(f);
    cvec out(target.n, 0.0);
    for (int j = 0; j < g.n; ++j) {
        const int m = g.mode(j);
        const cd phase = std::polar(1.0, 2.0 * pi * m * shift / g.length);
        if (j == g.n / 2 && target.n > g.n) {
            // split the nyquist coefficient symmetrically
            const cd ph_neg = std::conj(phase);
            out[m] += 0.5 * c[j] * phase;
            out[target.n - m] += 0.5 * c[j] * ph_neg;
            continue;
        }
        const int slot = m >= 0 ? m : target.n + m;
        out[slot] += c[j] * phase;
    }
    return ifft(target, out);
}

Field cyclic_shift(const Field &f, int s)
{
    Field out(f.grid);
    const int n = f.size();
    for (int j = 0; j < n; ++j) out.v[j] = f.v[((j + s) % n + n) % n];
    return out;
}

}  // namespace wwp
