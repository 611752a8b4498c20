#include "mcf/blowup.hpp"

#include <array>
#include <cmath>

namespace mcf {

namespace {

// Geometric grid over (0, S_max]: 12 decades below S_max.
double grid_point(double S_max, int samples, int k)
{
    const double lg_max = std::log(S_max);
    const double lg_min = lg_max - 12.0 * std::log(10.0);
    if (samples == 1)
        return S_max;
    const double f = static_cast<double>(k) / (samples - 1);
    return std::exp(lg_min + f * (lg_max - lg_min));
}

} // namespace

ValidityReport check_validity(const PotentialExpr& g, double S_max, int samples)
{
    if (!(S_max > 0.0))
        throw OutOfRangeError("check_validity requires S_max > 0");
    if (samples < 2)
        throw OutOfRangeError("check_validity requires samples >= 2");

    ValidityReport rep;
    rep.samples = samples;
    rep.S_max = S_max;
    rep.g_S_at_0 = eval_g_jet(g, 0.0).v1;
    rep.cond_extension = rep.g_S_at_0 > 0.0;
    rep.cond_positive_1 = true;
    rep.cond_positive_2 = true;

    for (int k = 0; k < samples; ++k) {
        const double S = grid_point(S_max, samples, k);
        const Jet3 j = eval_g_jet(g, S);
        const bool ok1 = 1.0 / S + j.v1 > 0.0;
        const bool ok2 = j.v1 + S * j.v2 > 0.0;
        if (!ok1)
            rep.cond_positive_1 = false;
        if (!ok2)
            rep.cond_positive_2 = false;
        if ((!ok1 || !ok2) && !rep.first_violation_S)
            rep.first_violation_S = S;
    }
    return rep;
}

namespace {

struct ChartFrame {
    std::complex<double> fiber, base;
};

double chart_S(const std::complex<double>& fiber, const std::complex<double>& base)
{
    return std::norm(fiber) * (1.0 + std::norm(base));
}

/// Entries in (fiber, base) order; reordered for U2 afterwards.
HermitianMatrix2 closed_fiber_base(const PotentialExpr& g,
                                   const std::complex<double>& u,
                                   const std::complex<double>& v)
{
    const double nv = std::norm(v);
    if (u == std::complex<double>(0.0, 0.0)) {
        // Divisor restriction: only g-jets at 0 enter.
        const double gS0 = eval_g_jet(g, 0.0).v1;
        HermitianMatrix2 M;
        M.a11 = (1.0 + nv) * gS0;
        M.a22 = 1.0 / (1.0 + nv);
        M.a12 = 0.0;
        return M;
    }
    const double S = chart_S(u, v);
    const Jet3 gj = eval_g_jet(g, S);
    const double D = gj.v1 + S * gj.v2; // g_S + S g_SS = f_S + S f_SS
    const double nu = std::norm(u);
    HermitianMatrix2 M;
    M.a11 = (1.0 + nv) * D;
    M.a12 = std::conj(u) * v * D;
    // The log S part of the base-base entry contributes exactly the
    // Fubini-Study coefficient 1/(1+|v|^2)^2.
    M.a22 = 1.0 / ((1.0 + nv) * (1.0 + nv)) + nu * (gj.v1 + nu * nv * gj.v2);
    return M;
}

HermitianMatrix2 to_chart_order(Chart chart, const HermitianMatrix2& fb)
{
    if (chart == Chart::U1)
        return fb;
    // U2: coordinates are (z1, z2) = (base, fiber); swapping the basis order
    // transposes the role of the entries and conjugates the off-diagonal.
    HermitianMatrix2 M;
    M.a11 = fb.a22;
    M.a22 = fb.a11;
    M.a12 = std::conj(fb.a12);
    return M;
}

} // namespace

HermitianMatrix2 pullback_matrix_closed(const PotentialExpr& g, const ChartPoint& p)
{
    return to_chart_order(p.chart, closed_fiber_base(g, p.z_fiber, p.z_base));
}

HermitianMatrix2 pullback_matrix_numeric(const PotentialExpr& g,
                                         const ChartPoint& p, double h)
{
    if (p.z_fiber == std::complex<double>(0.0, 0.0))
        throw DomainError("numeric pullback needs z_fiber != 0 (potential singular on E)");
    if (!(h > 0.0))
        throw OutOfRangeError("stencil step h must be positive");

    // phi over the four real chart coordinates (Re/Im fiber, Re/Im base),
    // evaluated in long double: the h^-2 stencils amplify evaluation noise,
    // and double-precision phi would dominate the O(h^2) truncation.
    const std::array<long double, 4> x0 = {p.z_fiber.real(), p.z_fiber.imag(),
                                           p.z_base.real(), p.z_base.imag()};
    const auto phi = [&](const std::array<long double, 4>& x) -> long double {
        const long double nf = x[0] * x[0] + x[1] * x[1];
        const long double nb = x[2] * x[2] + x[3] * x[3];
        const long double S = nf * (1.0L + nb);
        if (!(S > 0.0L))
            throw DomainError("stencil point left the chart domain");
        return std::log(S) + eval_value_ld(g, S);
    };
    const long double hl = h;
    const auto shifted = [&](int i, long double di, int j, long double dj) {
        std::array<long double, 4> x = x0;
        x[i] += di;
        if (j >= 0)
            x[j] += dj;
        return phi(x);
    };
    const long double phi0 = phi(x0);
    const auto d2_pure = [&](int i) {
        return (shifted(i, hl, -1, 0) - 2.0L * phi0 + shifted(i, -hl, -1, 0)) / (hl * hl);
    };
    const auto d2_mixed = [&](int i, int j) {
        return (shifted(i, hl, j, hl) - shifted(i, hl, j, -hl) -
                shifted(i, -hl, j, hl) + shifted(i, -hl, j, -hl)) /
               (4.0L * hl * hl);
    };

    HermitianMatrix2 fb;
    fb.a11 = static_cast<double>(0.25L * (d2_pure(0) + d2_pure(1)));
    fb.a22 = static_cast<double>(0.25L * (d2_pure(2) + d2_pure(3)));
    // d^2/dz_f dzbar_b = ((phi_xx'+phi_yy') + i(phi_xy' - phi_yx'))/4
    const double re = static_cast<double>(0.25L * (d2_mixed(0, 2) + d2_mixed(1, 3)));
    const double im = static_cast<double>(0.25L * (d2_mixed(0, 3) - d2_mixed(1, 2)));
    fb.a12 = {re, im};
    return to_chart_order(p.chart, fb);
}

double fubini_study_check(std::complex<double> z_base)
{
    const double w = 1.0 + std::norm(z_base);
    return 1.0 / (w * w);
}

} // namespace mcf
