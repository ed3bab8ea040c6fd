#pragma once

#include <memory>
#include <vector>

#include "wwp/spectral.hpp"

namespace wwp {

// gamma(alpha) = alpha + xi(alpha), xi periodic
struct Curve {
    Grid grid;
    Field xi;
    Field gamma;
    Field gamma_prime;
    Field gamma_second;

    Curve() = default;
    static Curve from_xi(const Field &xi);
    static Curve flat(const Grid &g);
};

struct ChordArc {
    double nu = 0.0;
    double upper = 0.0;
    int j = -1, k = -1;
};

class ChordArcError : public RegimeError {
public:
    ChordArcError(const std::string &msg, int j, int k) : RegimeError(msg), j(j), k(k) {}
    int j, k;
};

// chord-arc constants over node pairs taken at the given stride (minimal periodic image)
ChordArc chord_arc(const Curve &c, int stride = 1);
void require_chord_arc(const Curve &c, double min_nu = 1e-3, int stride = 4);

enum class Quadrature { alternating, desingularized };

// cached periodized Cauchy kernel P_jk = sum_n 1/(gamma_j - gamma_k - nL) = a cot(a (gamma_j - gamma_k)), a = pi/L
class CurveKernel {
public:
    explicit CurveKernel(const Curve &c);

    const Curve &curve() const { return c_; }
    const Grid &grid() const { return c_.grid; }
    int n() const { return c_.grid.n; }
    double a() const { return a_; }
    const cd *row(int j) const { return P_.data() + static_cast<size_t>(j) * n(); }
    // flat kernel a cot(a h d) for index offset d
    double flat(int d) const { return flat_[(d % n() + n()) % n()]; }
    // real part of the curve Hilbert transform acting on real fields
    const rvec &double_layer() const;

private:
    Curve c_;
    double a_;
    cvec P_;
    rvec flat_;
    mutable rvec K_;
};

Field curve_hilbert(const CurveKernel &k, const Field &f, Quadrature q = Quadrature::alternating);
Field curve_hilbert(const Curve &c, const Field &f, Quadrature q = Quadrature::alternating);
// conj(H conj f)
Field conj_curve_hilbert(const CurveKernel &k, const Field &f, Quadrature q = Quadrature::alternating);

// [g, H](f_alpha / gamma_alpha) = (1/pi i) int (g(a)-g(b))/(gamma(a)-gamma(b)) f_b db.
// g = linear * alpha + (periodic samples); with conj set the conjugate curve and conj(H) are used.
Field commutator(const CurveKernel &k, const Field &g, const Field &f, bool conj = false, double linear = 0.0);
Field commutator(const Curve &c, const Field &g, const Field &f, double linear = 0.0);

// int prod_j (A_j(a)-A_j(b))/(gamma(a)-gamma(b)) f(b)/(gamma(a)-gamma(b)) db, principal value.
// All curves in the product are the same curve (or all its conjugate).
Field s1_apply(const CurveKernel &k, const std::vector<Field> &A, const Field &f, bool conj = false);
// int prod_j (A_j(a)-A_j(b))/(gamma(a)-gamma(b)) f_b db, smooth kernel with analytic diagonal.
Field s2_apply(const CurveKernel &k, const std::vector<Field> &A, const Field &f, bool conj = false);

// power-p periodized kernel as a polynomial of P; exposed for tests
cd periodized_power(cd P, double a, int p);

struct RealSolve {
    Field f;
    int iterations = 0;
    double last_change = 0.0;
};

// real f with (I - H) f = rhs in the real-part sense
RealSolve solve_real_part(const CurveKernel &k, const Field &rhs, double tol = 1e-12, int max_iter = 100);
Field solve_real_part(const Curve &c, const Field &rhs);

// generic fixed point f = r + M f with a dense real matrix
RealSolve fixed_point_real(const rvec &M, const Field &r, double tol, int max_iter, const char *what);

double l2_norm(const Field &f);

}  // namespace wwp
