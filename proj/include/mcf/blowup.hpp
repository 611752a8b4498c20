#ifndef MCF_BLOWUP_HPP
#define MCF_BLOWUP_HPP

#include <complex>
#include <optional>

#include "mcf/potential.hpp"

namespace mcf {

/// Sampled check of the Kahler/extension conditions of f = log S + g:
/// g_S(0) > 0 (extension across the exceptional divisor), 1/S + g_S > 0 and
/// g_S + S g_SS > 0 (positivity on C^m \ {0}). The open conditions are
/// verified on a geometric grid only; all-true certifies the sampled grid,
/// not the whole ray.
struct ValidityReport {
    double g_S_at_0 = 0.0;
    bool cond_extension = false;  // g_S(0) > 0
    bool cond_positive_1 = false; // 1/S + g_S > 0 on the grid
    bool cond_positive_2 = false; // g_S + S g_SS > 0 on the grid
    std::optional<double> first_violation_S;
    int samples = 0;
    double S_max = 0.0;

    bool all_ok() const
    {
        return cond_extension && cond_positive_1 && cond_positive_2;
    }
};

ValidityReport check_validity(const PotentialExpr& g, double S_max = 100.0,
                              int samples = 2048);

/// Blow-up charts of Bl_0 C^2. On U1 the fiber coordinate is z1 and the
/// blow-down is (z1, z1 z2); on U2 the fiber is z2 and the blow-down is
/// (z1 z2, z2). In both charts S = |z_fiber|^2 (1 + |z_base|^2) and the
/// exceptional divisor is z_fiber = 0.
enum class Chart { U1, U2 };

struct ChartPoint {
    Chart chart;
    std::complex<double> z_fiber;
    std::complex<double> z_base;
};

/// 2x2 Hermitian matrix, upper triangle stored; rows/columns are the chart
/// coordinates (z1, z2) in their natural order.
struct HermitianMatrix2 {
    double a11 = 0.0;
    double a22 = 0.0;
    std::complex<double> a12;

    double det() const { return a11 * a22 - std::norm(a12); }
    bool positive_definite() const { return a11 > 0.0 && det() > 0.0; }
};

/// Closed-form pullback of sqrt(-1) d dbar (log S + g) to the chart (m = 2).
/// Off the divisor the entries are the complex Hessian of f(S(chart)); on
/// z_fiber = 0 the divisor restriction diag((1+|w|^2) g_S(0), 1/(1+|w|^2))
/// (fiber block first on U1, last on U2) is returned.
HermitianMatrix2 pullback_matrix_closed(const PotentialExpr& g, const ChartPoint& p);

/// Same matrix by central finite differences of the pulled-back potential
/// on the four real chart coordinates: 4 d^2/dz dzbar = d^2/dx^2 + d^2/dy^2
/// per coordinate, mixed second differences for the off-diagonal entry.
/// Requires z_fiber != 0. Agrees with the closed form to O(h^2).
HermitianMatrix2 pullback_matrix_numeric(const PotentialExpr& g,
                                         const ChartPoint& p, double h = 1e-4);

/// Fubini-Study coefficient of d dbar log(1 + |w|^2) on the divisor
/// coordinate: 1/(1 + |w|^2)^2.
double fubini_study_check(std::complex<double> z_base);

} // namespace mcf

#endif // MCF_BLOWUP_HPP
