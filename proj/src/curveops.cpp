#include "wwp/curveops.hpp"

#include <cmath>
#include <sstream>

namespace wwp {

Curve Curve::from_xi(const Field &xi)
{
    Curve c;
    c.grid = xi.grid;
    c.xi = xi;
    c.gamma = Field::from_function(xi.grid, [](double a) { return cd(a); }) + xi;
    Field d1 = derivative(xi, 1);
    c.gamma_prime = d1 + 1.0;
    c.gamma_second = derivative(d1, 1);
    return c;
}

Curve Curve::flat(const Grid &g) { return from_xi(Field(g)); }

namespace {

// minimal-image chord for node pair (j, k)
inline void chord(const Curve &c, int j, int k, double &da, cd &dg)
{
    const double L = c.grid.length;
    double d = c.grid.node(j) - c.grid.node(k);
    double shift = 0.0;
    if (d > L / 2) shift = -L;
    if (d < -L / 2) shift = L;
    da = d + shift;
    dg = c.gamma.v[j] - c.gamma.v[k] + shift;
}

}  // namespace

ChordArc chord_arc(const Curve &c, int stride)
{
    ChordArc r;
    r.nu = 1e300;
    const int n = c.grid.n;
    for (int j = 0; j < n; j += stride) {
        for (int k = 0; k < n; k += stride) {
            if (j == k) continue;
            double da;
            cd dg;
            chord(c, j, k, da, dg);
            const double q = std::abs(dg) / std::abs(da);
            if (q < r.nu) {
                r.nu = q;
                r.j = j;
                r.k = k;
            }
            r.upper = std::max(r.upper, q);
        }
    }
    return r;
}

void require_chord_arc(const Curve &c, double min_nu, int stride)
{
    ChordArc r = chord_arc(c, stride);
    if (!(r.nu >= min_nu) || !std::isfinite(r.upper)) {
        if (stride > 1) r = chord_arc(c, 1);
        std::ostringstream os;
        os << "chord-arc violation: nu = " << r.nu << " at node pair (" << r.j << ", " << r.k << ")";
        throw ChordArcError(os.str(), r.j, r.k);
    }
}

CurveKernel::CurveKernel(const Curve &c) : c_(c), a_(pi / c.grid.length)
{
    const int n = c.grid.n;
    if (!c.gamma.finite()) throw RegimeError("curve kernel: non-finite curve samples");
    cvec E(n);
    for (int j = 0; j < n; ++j) E[j] = std::exp(2.0 * I * a_ * c.gamma.v[j]);
    P_.assign(static_cast<size_t>(n) * n, 0.0);
    // cot(a(z_j - z_k)) = i (E_j + E_k) / (E_j - E_k)
    for (int j = 0; j < n; ++j) {
        cd *row = P_.data() + static_cast<size_t>(j) * n;
        const double ejr = E[j].real(), eji = E[j].imag();
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double nr = ejr + E[k].real(), ni = eji + E[k].imag();
            const double dr = ejr - E[k].real(), di = eji - E[k].imag();
            const double inv = a_ / (dr * dr + di * di);
            const double qr = (nr * dr + ni * di) * inv;
            const double qi = (ni * dr - nr * di) * inv;
            row[k] = cd(-qi, qr);
        }
    }
    flat_.assign(n, 0.0);
    for (int d = 1; d < n; ++d) flat_[d] = a_ / std::tan(a_ * c.grid.h() * d);
}

const rvec &CurveKernel::double_layer() const
{
    if (!K_.empty()) return K_;
    const int n = this->n();
    const double h = grid().h();
    K_.assign(static_cast<size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        const cd *p = row(j);
        double *kr = K_.data() + static_cast<size_t>(j) * n;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            kr[k] = h / pi * (c_.gamma_prime.v[k] * p[k]).imag();
            sum += kr[k];
        }
        // Re H 1 = 0 exactly
        kr[j] = -sum;
    }
    return K_;
}

Field curve_hilbert(const CurveKernel &k, const Field &f, Quadrature q)
{
    check_same_grid(k.curve().xi, f, "curve_hilbert");
    const int n = k.n();
    const double h = k.grid().h();
    const Curve &c = k.curve();
    cvec w(n);
    for (int i = 0; i < n; ++i) w[i] = c.gamma_prime.v[i] * f.v[i];
    Field out(k.grid());
    const cd pref = 1.0 / (pi * I);
    if (q == Quadrature::alternating) {
        for (int j = 0; j < n; ++j) {
            const cd *p = k.row(j);
            cd acc = 0.0;
            for (int i = (j + 1) % 2; i < n; i += 2) acc += p[i] * w[i];
            out.v[j] = pref * 2.0 * h * acc;
        }
        return out;
    }
    Field h0 = flat_hilbert(f);
    for (int j = 0; j < n; ++j) {
        const cd *p = k.row(j);
        cd acc = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            acc += p[i] * w[i] - k.flat(j - i) * f.v[i];
        }
        acc += -0.5 * c.gamma_second.v[j] / c.gamma_prime.v[j] * f.v[j];
        out.v[j] = h0.v[j] + pref * h * acc;
    }
    return out;
}

Field curve_hilbert(const Curve &c, const Field &f, Quadrature q) { return curve_hilbert(CurveKernel(c), f, q); }

Field conj_curve_hilbert(const CurveKernel &k, const Field &f, Quadrature q)
{
    return curve_hilbert(k, f.conj(), q).conj();
}

namespace {

// h * [ sum_{k != j} (g_j - g_k) K_jk fp_k + g'_j fp_j / gamma'_j ], K = P or conj(P)
Field smooth_commutator_sum(const CurveKernel &k, const Field &g, const Field &fp, bool conj)
{
    const int n = k.n();
    const double h = k.grid().h();
    Field gp = derivative(g, 1);
    Field out(k.grid());
    const Field &gam = k.curve().gamma_prime;
    for (int j = 0; j < n; ++j) {
        const cd *p = k.row(j);
        const cd gj = g.v[j];
        cd acc = 0.0;
        if (!conj) {
            for (int i = 0; i < n; ++i) acc += (gj - g.v[i]) * p[i] * fp.v[i];
        } else {
            for (int i = 0; i < n; ++i) acc += (gj - g.v[i]) * std::conj(p[i]) * fp.v[i];
        }
        const cd gpj = conj ? std::conj(gam.v[j]) : gam.v[j];
        out.v[j] = h * (acc + gp.v[j] * fp.v[j] / gpj);
    }
    return out;
}

std::vector<std::vector<double>> power_tables(int pmax)
{
    // Q_1 = c, Q_{p+1} = (1/p)(1 + c^2) Q_p'(c)
    std::vector<std::vector<double>> q(pmax + 1);
    q[1] = {0.0, 1.0};
    for (int p = 1; p < pmax; ++p) {
        const auto &a = q[p];
        std::vector<double> d(a.size() > 1 ? a.size() - 1 : 1, 0.0);
        for (size_t i = 1; i < a.size(); ++i) d[i - 1] = a[i] * i;
        std::vector<double> r(d.size() + 2, 0.0);
        for (size_t i = 0; i < d.size(); ++i) {
            r[i] += d[i] / p;
            r[i + 2] += d[i] / p;
        }
        q[p + 1] = r;
    }
    return q;
}

const std::vector<std::vector<double>> &tables()
{
    static const auto t = power_tables(8);
    return t;
}

inline cd horner(const std::vector<double> &c, cd x)
{
    cd s = 0.0;
    for (size_t i = c.size(); i-- > 0;) s = s * x + c[i];
    return s;
}

void check_factors(const CurveKernel &k, const std::vector<Field> &A, const Field &f, const char *where)
{
    for (const auto &a : A) check_same_grid(k.curve().xi, a, where);
    check_same_grid(k.curve().xi, f, where);
    if (A.size() > 6) throw std::invalid_argument(std::string(where) + ": too many factors");
}

}  // namespace

cd periodized_power(cd P, double a, int p)
{
    if (p < 1 || p > 8) throw std::invalid_argument("periodized_power: unsupported power");
    return std::pow(a, p) * horner(tables()[p], P / a);
}

Field commutator(const CurveKernel &k, const Field &g, const Field &f, bool conj, double linear)
{
    check_same_grid(k.curve().xi, g, "commutator");
    check_same_grid(k.curve().xi, f, "commutator");
    Field geff = g;
    if (linear != 0.0) geff -= linear * (conj ? k.curve().xi.conj() : k.curve().xi);
    Field s = smooth_commutator_sum(k, geff, derivative(f, 1), conj);
    const cd pref = (conj ? -1.0 : 1.0) / (pi * I);
    return pref * s;
}

Field commutator(const Curve &c, const Field &g, const Field &f, double linear)
{
    return commutator(CurveKernel(c), g, f, false, linear);
}

Field s2_apply(const CurveKernel &k, const std::vector<Field> &A, const Field &f, bool conj)
{
    check_factors(k, A, f, "s2_apply");
    const int n = k.n();
    const int m = static_cast<int>(A.size());
    const double h = k.grid().h();
    const double a = k.a();
    Field fp = derivative(f, 1);
    Field out(k.grid());
    if (m == 0) {
        out = Field(k.grid(), integral(fp));
        return out;
    }
    std::vector<Field> Ap;
    for (const auto &x : A) Ap.push_back(derivative(x, 1));
    const auto &poly = tables()[m];
    const double am = std::pow(a, m);
    const Field &gam = k.curve().gamma_prime;
    for (int j = 0; j < n; ++j) {
        const cd *p = k.row(j);
        cd acc = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            cd num = 1.0;
            for (int r = 0; r < m; ++r) num *= A[r].v[j] - A[r].v[i];
            const cd P = conj ? std::conj(p[i]) : p[i];
            acc += num * am * horner(poly, P / a) * fp.v[i];
        }
        cd diag = fp.v[j];
        const cd gj = conj ? std::conj(gam.v[j]) : gam.v[j];
        for (int r = 0; r < m; ++r) diag *= Ap[r].v[j] / gj;
        out.v[j] = h * (acc + diag);
    }
    return out;
}

Field s1_apply(const CurveKernel &k, const std::vector<Field> &A, const Field &f, bool conj)
{
    check_factors(k, A, f, "s1_apply");
    const int n = k.n();
    const int m = static_cast<int>(A.size());
    const double h = k.grid().h();
    const double a = k.a();
    const auto &poly = tables()[m + 1];
    const double am = std::pow(a, m + 1);
    Field out(k.grid());
    for (int j = 0; j < n; ++j) {
        const cd *p = k.row(j);
        cd acc = 0.0;
        for (int i = (j + 1) % 2; i < n; i += 2) {
            cd num = 1.0;
            for (int r = 0; r < m; ++r) num *= A[r].v[j] - A[r].v[i];
            const cd P = conj ? std::conj(p[i]) : p[i];
            acc += num * am * horner(poly, P / a) * f.v[i];
        }
        out.v[j] = 2.0 * h * acc;
    }
    return out;
}

double l2_norm(const Field &f)
{
    double s = 0.0;
    for (auto &x : f.v) s += std::norm(x);
    return std::sqrt(s * f.grid.h());
}

RealSolve fixed_point_real(const rvec &M, const Field &r, double tol, int max_iter, const char *what)
{
    const int n = r.size();
    const double h = r.grid.h();
    rvec rr(n), f(n), g(n);
    for (int i = 0; i < n; ++i) rr[i] = r.v[i].real();
    f = rr;
    RealSolve out;
    for (int it = 1; it <= max_iter; ++it) {
        double d2 = 0.0, f2 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double *mr = M.data() + static_cast<size_t>(j) * n;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) acc += mr[i] * f[i];
            g[j] = rr[j] + acc;
            d2 += (g[j] - f[j]) * (g[j] - f[j]);
            f2 += g[j] * g[j];
        }
        f.swap(g);
        const double d = std::sqrt(d2 * h), fn = std::sqrt(f2 * h);
        out.iterations = it;
        out.last_change = d;
        if (d <= tol * std::max(1.0, fn)) {
            out.f = Field(r.grid);
            for (int i = 0; i < n; ++i) out.f.v[i] = f[i];
            return out;
        }
        if (!std::isfinite(d)) break;
    }
    std::ostringstream os;
    os << what << ": fixed point did not converge in " << max_iter << " iterations (last change " << out.last_change
       << ")";
    throw RegimeError(os.str());
}

RealSolve solve_real_part(const CurveKernel &k, const Field &rhs, double tol, int max_iter)
{
    check_same_grid(k.curve().xi, rhs, "solve_real_part");
    return fixed_point_real(k.double_layer(), rhs, tol, max_iter, "solve_real_part");
}

Field solve_real_part(const Curve &c, const Field &rhs) { return solve_real_part(CurveKernel(c), rhs).f; }

}  // namespace wwp
