#ifndef MCF_FLOW_HPP
#define MCF_FLOW_HPP

#include <optional>
#include <vector>

#include "mcf/curvature.hpp"

namespace mcf {

struct FlowOptions {
    double r_stop = 1e-8;      // radius at which the trajectory counts as collapsed
    double rel_tol = 1e-10;    // adaptive step relative tolerance (on u = R^2)
    double abs_tol = 1e-12;
    long max_steps = 10'000'000;
    double output_stride = 0.0; // min time between recorded samples; 0 = every step
};

enum class FlowStatus { Collapsed, Stalled, MaxStepsExceeded };

struct TrajectorySample {
    double t;
    double R;
    double H;
    double A_sq;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    FlowStatus status = FlowStatus::Stalled;
    double t_end = 0.0;

    /// Radius at an interior time by monotone cubic Hermite interpolation in
    /// u = R^2 (u and du/dt = 2RH are known at every sample). Accurate when
    /// the trajectory was recorded densely (output_stride = 0).
    double radius_at(double t) const;
};

/// Largest R* <= R_probe_max with H < 0 on a dense geometric sample of
/// (0, R*]; +infinity when H < 0 on the whole probed range. A detected sign
/// change is refined by bisection, so R* is the sampled zero crossing of H.
double monotone_radius(const RadialMetric& metric, int m, double R_probe_max);

/// Integrates dR/dt = H(R) with an adaptive Dormand-Prince 4(5) pair in the
/// variable u = R^2, in which the collapse is asymptotically linear
/// (du/dt -> -2c). Stops at R <= r_stop (Collapsed), at a mean-curvature
/// zero (Stalled), or when the step budget runs out.
Trajectory integrate(const RadialMetric& metric, int m, double R0,
                     const FlowOptions& opts = {});

/// T_sing = integral_0^R0 dR / (-H(R)) by adaptive quadrature; equivalent to
/// the trajectory's collapse time by separation of variables. The integrand
/// R / (-R H(R)) is smooth through R = 0 (it vanishes linearly there).
/// Throws StallError if H >= 0 anywhere on the quadrature grid.
double singularity_time_quadrature(const RadialMetric& metric, int m, double R0);

/// Leading collapse coefficients from the g-jets at S = 0:
///   c = 1/((2m-1) sqrt(g_S(0)))   so that R*H -> -c,
///   W0 = 1/g_S(0)                 so that R^2*|A|^2 -> W0,
///   limit_predicted = W0/(2c) = (2m-1)/(2 sqrt(g_S(0))),
/// the predicted limit of (T - t)|A|^2. For the flat override the same
/// limits are c = 1, W0 = 2m-1, limit = (2m-1)/2.
struct AsymptoticConstants {
    double c;
    double W0;
    double limit_predicted;
};

AsymptoticConstants asymptotic_constants(const RadialMetric& metric, int m);

enum class SingularityType { TypeI, TypeII, Inconclusive };

struct SingularityReport {
    double T_sing_trajectory = 0.0;
    double T_sing_quadrature = 0.0;
    std::optional<double> T_sing_closed_form;
    SingularityType type_verdict = SingularityType::Inconclusive;
    double limit_estimate = 0.0;  // tail limit of (T-t)|A|^2
    double limit_predicted = 0.0; // (2m-1)/(2 sqrt(g_S(0)))
    double c_constant = 0.0;      // predicted lim R*H (negative)
    double max_product = 0.0;     // sup over samples of (T-t)|A|^2
};

/// Singularity classification of a collapsed trajectory. Type I when the
/// tail products (T-t)|A|^2 converge (relative spread of the tail decade
/// below 5%); Type II when they grow monotonically past 10x the predicted
/// limit; Inconclusive otherwise. Throws NotCollapsedError unless
/// traj.status == Collapsed.
SingularityReport classify(const RadialMetric& metric, int m, double R0,
                           const Trajectory& traj,
                           std::optional<double> closed_form = std::nullopt);

/// Radii on a geometric grid of (0, R_max] where |A|^2 exceeds threshold;
/// for valid potentials these cluster only near R = 0.
std::vector<double> blow_up_locus_scan(const RadialMetric& metric, int m,
                                       double R_max, int samples,
                                       double threshold);

} // namespace mcf

#endif // MCF_FLOW_HPP
