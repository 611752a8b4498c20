#ifndef MCF_JET_HPP
#define MCF_JET_HPP

#include <cmath>

#include "mcf/errors.hpp"

namespace mcf {

/// Order-3 truncated Taylor number: value and first three derivatives with
/// respect to a single independent variable. Closed under arithmetic and
/// under composition with smooth elementary functions (Faa di Bruno up to
/// order 3), so derivatives are exact up to floating round-off.
struct Jet3 {
    double v0 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double v3 = 0.0;

    static Jet3 constant(double c) { return {c, 0.0, 0.0, 0.0}; }
    static Jet3 variable(double x) { return {x, 1.0, 0.0, 0.0}; }

    bool is_constant() const { return v1 == 0.0 && v2 == 0.0 && v3 == 0.0; }
    bool is_finite() const {
        return std::isfinite(v0) && std::isfinite(v1) && std::isfinite(v2) &&
               std::isfinite(v3);
    }

    Jet3 operator-() const { return {-v0, -v1, -v2, -v3}; }

    friend Jet3 operator+(const Jet3& a, const Jet3& b) {
        return {a.v0 + b.v0, a.v1 + b.v1, a.v2 + b.v2, a.v3 + b.v3};
    }
    friend Jet3 operator-(const Jet3& a, const Jet3& b) {
        return {a.v0 - b.v0, a.v1 - b.v1, a.v2 - b.v2, a.v3 - b.v3};
    }

    // Leibniz: (uv)'' = u''v + 2u'v' + uv'', (uv)''' = u'''v + 3u''v' + 3u'v'' + uv'''
    friend Jet3 operator*(const Jet3& a, const Jet3& b) {
        return {a.v0 * b.v0,
                a.v1 * b.v0 + a.v0 * b.v1,
                a.v2 * b.v0 + 2.0 * a.v1 * b.v1 + a.v0 * b.v2,
                a.v3 * b.v0 + 3.0 * a.v2 * b.v1 + 3.0 * a.v1 * b.v2 + a.v0 * b.v3};
    }

    // w = u/v solved from u = w*v one order at a time.
    friend Jet3 operator/(const Jet3& a, const Jet3& b) {
        if (b.v0 == 0.0)
            throw DomainError("division by zero");
        const double inv = 1.0 / b.v0;
        Jet3 w;
        w.v0 = a.v0 * inv;
        w.v1 = (a.v1 - w.v0 * b.v1) * inv;
        w.v2 = (a.v2 - w.v0 * b.v2 - 2.0 * w.v1 * b.v1) * inv;
        w.v3 = (a.v3 - w.v0 * b.v3 - 3.0 * w.v1 * b.v2 - 3.0 * w.v2 * b.v1) * inv;
        return w;
    }

    friend Jet3 operator*(double c, const Jet3& a) {
        return {c * a.v0, c * a.v1, c * a.v2, c * a.v3};
    }
    friend Jet3 operator*(const Jet3& a, double c) { return c * a; }
    friend Jet3 operator+(const Jet3& a, double c) {
        return {a.v0 + c, a.v1, a.v2, a.v3};
    }
    friend Jet3 operator+(double c, const Jet3& a) { return a + c; }
    friend Jet3 operator-(const Jet3& a, double c) { return a + (-c); }
    friend Jet3 operator-(double c, const Jet3& a) { return Jet3::constant(c) - a; }
};

namespace detail {

/// h = phi(u) by Faa di Bruno to order 3, given phi's derivatives at u.v0.
/// Constant inner jets short-circuit so that infinite phi-derivatives at a
/// domain edge are never multiplied by zero.
inline Jet3 compose(const Jet3& u, double d0, double d1, double d2, double d3)
{
    if (u.is_constant())
        return Jet3::constant(d0);
    Jet3 h;
    h.v0 = d0;
    h.v1 = d1 * u.v1;
    h.v2 = d1 * u.v2 + d2 * u.v1 * u.v1;
    h.v3 = d1 * u.v3 + 3.0 * d2 * u.v1 * u.v2 + d3 * u.v1 * u.v1 * u.v1;
    return h;
}

inline bool is_integer(double x)
{
    return std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15;
}

} // namespace detail

inline Jet3 exp(const Jet3& u)
{
    const double e = std::exp(u.v0);
    return detail::compose(u, e, e, e, e);
}

inline Jet3 log(const Jet3& u)
{
    if (!(u.v0 > 0.0))
        throw DomainError("log of nonpositive value");
    const double inv = 1.0 / u.v0;
    return detail::compose(u, std::log(u.v0), inv, -inv * inv,
                           2.0 * inv * inv * inv);
}

inline Jet3 sqrt(const Jet3& u)
{
    if (u.is_constant()) {
        if (u.v0 < 0.0)
            throw DomainError("sqrt of negative value");
        return Jet3::constant(std::sqrt(u.v0));
    }
    if (!(u.v0 > 0.0))
        throw DomainError("sqrt jet requires a positive argument");
    const double s = std::sqrt(u.v0);
    return detail::compose(u, s, 0.5 / s, -0.25 / (s * u.v0),
                           0.375 / (s * u.v0 * u.v0));
}

inline Jet3 sin(const Jet3& u)
{
    const double s = std::sin(u.v0), c = std::cos(u.v0);
    return detail::compose(u, s, c, -s, -c);
}

inline Jet3 cos(const Jet3& u)
{
    const double s = std::sin(u.v0), c = std::cos(u.v0);
    return detail::compose(u, c, -s, -c, s);
}

namespace detail {

/// falling(p,k) * u0^(p-k); returns exactly 0 when the falling factorial
/// vanishes, so 0 * inf never arises for integer exponents at u0 = 0.
inline double pow_deriv(double u0, double p, int k)
{
    double coeff = 1.0;
    for (int i = 0; i < k; ++i)
        coeff *= (p - i);
    if (coeff == 0.0)
        return 0.0;
    return coeff * std::pow(u0, p - k);
}

} // namespace detail

/// u^p for a constant real exponent. Negative bases need an integer p;
/// at u0 = 0 derivatives must stay finite (p integer or large enough).
inline Jet3 pow(const Jet3& u, double p)
{
    if (u.is_constant()) {
        if (u.v0 < 0.0 && !detail::is_integer(p))
            throw DomainError("real exponent on negative base");
        if (u.v0 == 0.0 && p < 0.0)
            throw DomainError("zero raised to a negative power");
        return Jet3::constant(std::pow(u.v0, p));
    }
    if (u.v0 < 0.0 && !detail::is_integer(p))
        throw DomainError("real exponent on negative base");
    if (u.v0 == 0.0 && p < 0.0)
        throw DomainError("zero raised to a negative power");
    Jet3 h = detail::compose(u, detail::pow_deriv(u.v0, p, 0),
                             detail::pow_deriv(u.v0, p, 1),
                             detail::pow_deriv(u.v0, p, 2),
                             detail::pow_deriv(u.v0, p, 3));
    if (!h.is_finite())
        throw DomainError("power with non-finite derivative jet");
    return h;
}

/// u^w with a genuinely varying exponent: exp(w log u), so u0 > 0 required.
inline Jet3 pow(const Jet3& u, const Jet3& w)
{
    if (w.is_constant())
        return pow(u, w.v0);
    if (!(u.v0 > 0.0))
        throw DomainError("variable exponent requires a positive base");
    return exp(w * log(u));
}

} // namespace mcf

#endif // MCF_JET_HPP
