#pragma once

#include "wwp/spectral.hpp"

namespace wwp {

// second-order Taylor jet in time: value, first and second time derivatives
struct Jet {
    Field v[3];

    Jet() = default;
    explicit Jet(const Grid &g) : v{Field(g), Field(g), Field(g)} {}
    Jet(Field a, Field b, Field c) : v{std::move(a), std::move(b), std::move(c)} {}
    static Jet constant(const Field &f) { return Jet(f, Field(f.grid), Field(f.grid)); }

    const Grid &grid() const { return v[0].grid; }
    Jet conj() const { return Jet(v[0].conj(), v[1].conj(), v[2].conj()); }

    template <class Op>
    Jet map(Op &&op) const
    {
        return Jet(op(v[0]), op(v[1]), op(v[2]));
    }

    Jet &operator+=(const Jet &o)
    {
        for (int i = 0; i < 3; ++i) v[i] += o.v[i];
        return *this;
    }
    Jet &operator-=(const Jet &o)
    {
        for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
        return *this;
    }
    Jet &operator*=(cd s)
    {
        for (int i = 0; i < 3; ++i) v[i] *= s;
        return *this;
    }
};

inline Jet operator+(Jet a, const Jet &b) { return a += b; }
inline Jet operator-(Jet a, const Jet &b) { return a -= b; }
inline Jet operator*(Jet a, cd s) { return a *= s; }
inline Jet operator*(cd s, Jet a) { return a *= s; }
inline Jet operator-(Jet a) { return a *= -1.0; }

inline Jet operator*(const Jet &a, const Jet &b)
{
    return Jet(a.v[0] * b.v[0], a.v[1] * b.v[0] + a.v[0] * b.v[1],
               a.v[2] * b.v[0] + 2.0 * (a.v[1] * b.v[1]) + a.v[0] * b.v[2]);
}

inline Jet flat_hilbert(const Jet &f)
{
    return f.map([](const Field &x) { return flat_hilbert(x); });
}
inline Jet conj_flat_hilbert(const Jet &f)
{
    return f.map([](const Field &x) { return conj_flat_hilbert(x); });
}
inline Jet derivative(const Jet &f, int order = 1)
{
    return f.map([order](const Field &x) { return derivative(x, order); });
}

}  // namespace wwp
