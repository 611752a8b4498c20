#include "mcf/oracles.hpp"

#include <cmath>

#include "mcf/errors.hpp"

namespace mcf::oracles {

namespace {

double burns_lhs(double R)
{
    return 0.5 * R * R + std::log(3.0 * R * R + 1.0) / 3.0;
}

} // namespace

double burns_T_sing(double R0)
{
    if (!(R0 > 0.0))
        throw OutOfRangeError("burns_T_sing requires R0 > 0");
    return burns_lhs(R0);
}

double burns_radius(double R0, double t)
{
    const double T = burns_T_sing(R0);
    if (!(t >= 0.0) || t > T)
        throw OutOfRangeError("burns_radius requires 0 <= t <= T_sing");
    const double rhs = T - t;
    double lo = 0.0, hi = R0;
    // burns_lhs is strictly increasing, so plain bisection converges.
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (burns_lhs(mid) < rhs)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double flat_radius(double R0, double t, int m)
{
    (void)m; // averaged-H convention: dR/dt = -1/R for every m
    if (!(R0 > 0.0))
        throw OutOfRangeError("flat_radius requires R0 > 0");
    const double T = 0.5 * R0 * R0;
    if (!(t >= 0.0) || t > T)
        throw OutOfRangeError("flat_radius requires 0 <= t <= R0^2/2");
    return std::sqrt(R0 * R0 - 2.0 * t);
}

} // namespace mcf::oracles
