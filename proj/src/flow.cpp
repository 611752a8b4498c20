#include "mcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcf/quadrature.hpp"

namespace mcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Compensated time accumulator: near collapse the accepted steps shrink far
/// below one ulp of t, and naive t += dt would stagnate.
struct KahanSum {
    double hi = 0.0;
    double lo = 0.0;
    void add(double x)
    {
        const double y = x - lo;
        const double t = hi + y;
        lo = (t - hi) - y;
        hi = t;
    }
    double value() const { return hi; }
};

struct StepResult {
    double u_new;
    double error;
};

/// One Dormand-Prince 4(5) attempt on the autonomous scalar ODE u' = G(u).
/// Returns nullopt when a stage leaves the domain (u < 0 or evaluation
/// throws); the caller halves dt and retries.
template <class F>
std::optional<StepResult> dp45_try(const F& G, double u, double k1, double dt)
{
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                            e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                            e6 = 187.0 / 2100, e7 = 1.0 / 40;
    try {
        const double k2 = G(u + dt * (a21 * k1));
        const double k3 = G(u + dt * (a31 * k1 + a32 * k2));
        const double k4 = G(u + dt * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = G(u + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 =
            G(u + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double u5 =
            u + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        if (!(u5 > 0.0) || !std::isfinite(u5))
            return std::nullopt;
        const double k7 = G(u5);
        const double u4 =
            u + dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        return StepResult{u5, std::abs(u5 - u4)};
    } catch (const Error&) {
        return std::nullopt;
    }
}

double stall_G_threshold(double R)
{
    // |H| < 1e-14 (1 + 1/R)  <=>  |G| = 2R|H| < 2e-14 (R + 1)
    return 2e-14 * (R + 1.0);
}

/// An interior zero of H is an attracting equilibrium of u' = G(u): the flow
/// approaches it asymptotically and an explicit stepper limit-cycles around
/// it without ever shrinking |G| to the stall threshold. Once |G| has
/// collapsed far below its natural scale, locate the zero by bisection just
/// below the current u and park the state there (G < 0 side, |G| under the
/// threshold). Returns the refined u, or nullopt when G has no sign change
/// below (no equilibrium: keep integrating).
template <class F>
std::optional<double> refine_stall_point(const F& G, double u)
{
    const double eps = std::numeric_limits<double>::epsilon();
    double dlt = 32.0 * eps * u;
    double lo = -1.0;
    try {
        while (dlt < 0.5 * u) {
            if (G(u - dlt) >= 0.0) {
                lo = u - dlt;
                break;
            }
            dlt *= 2.0;
        }
    } catch (const Error&) {
        return std::nullopt;
    }
    if (lo < 0.0)
        return std::nullopt;
    double hi = u; // G(hi) < 0
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        const double Gm = G(mid);
        if (Gm >= 0.0) {
            lo = mid;
        } else {
            hi = mid;
            if (std::abs(Gm) < stall_G_threshold(std::sqrt(mid)))
                break;
        }
    }
    return hi;
}

} // namespace

double Trajectory::radius_at(double t) const
{
    if (samples.size() < 2)
        throw OutOfRangeError("trajectory has no interior samples");
    if (t < samples.front().t || t > samples.back().t)
        throw OutOfRangeError("time outside the recorded trajectory");
    const auto it = std::lower_bound(
        samples.begin(), samples.end(), t,
        [](const TrajectorySample& s, double tv) { return s.t < tv; });
    if (it == samples.begin())
        return samples.front().R;
    const TrajectorySample& s1 = *it;
    const TrajectorySample& s0 = *(it - 1);
    if (s1.t == t)
        return s1.R;
    const double dt = s1.t - s0.t;
    const double s = (t - s0.t) / dt;
    const double u0 = s0.R * s0.R, u1 = s1.R * s1.R;
    const double m0 = 2.0 * s0.R * s0.H, m1 = 2.0 * s1.R * s1.H;
    const double s2 = s * s, s3 = s2 * s;
    const double u = (2 * s3 - 3 * s2 + 1) * u0 + (s3 - 2 * s2 + s) * dt * m0 +
                     (-2 * s3 + 3 * s2) * u1 + (s3 - s2) * dt * m1;
    return std::sqrt(std::max(u, 0.0));
}

double monotone_radius(const RadialMetric& metric, int m, double R_probe_max)
{
    if (!(R_probe_max > 0.0))
        throw OutOfRangeError("monotone_radius requires R_probe_max > 0");
    constexpr int kSamples = 4096;
    const double lg_hi = std::log(R_probe_max);
    const double lg_lo = lg_hi - 6.0 * std::log(10.0);
    double S_prev = 0.0;
    for (int k = 0; k < kSamples; ++k) {
        const double R = std::exp(lg_lo + (lg_hi - lg_lo) * k / (kSamples - 1));
        const double S = R * R;
        if (radius_times_H(metric, m, S) >= 0.0) {
            if (k == 0)
                return 0.0;
            // refine the sign change of R*H between the last two grid points
            double lo = S_prev, hi = S;
            for (int i = 0; i < 100 && hi - lo > 1e-15 * hi; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (radius_times_H(metric, m, mid) < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            return std::sqrt(0.5 * (lo + hi));
        }
        S_prev = S;
    }
    return kInf;
}

Trajectory integrate(const RadialMetric& metric, int m, double R0,
                     const FlowOptions& opts)
{
    if (!(opts.r_stop > 0.0) || !(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0) ||
        opts.max_steps < 1)
        throw OutOfRangeError("flow options must be positive");
    if (!std::isfinite(R0) || !(R0 > opts.r_stop))
        throw InvalidInitialRadiusError(
            "initial radius must satisfy r_stop < R0 < infinity");

    const double u_stop = opts.r_stop * opts.r_stop;
    const auto G = [&](double u) -> double {
        if (u < 0.0)
            throw DomainError("negative u stage");
        return 2.0 * radius_times_H(metric, m, u);
    };

    Trajectory traj;
    const double scale = std::max(1.0, R0);
    const double R_dense = 1.05 * std::max(1e3 * opts.r_stop, 1e-4 * scale);
    const double u_dense = R_dense * R_dense;

    double u = R0 * R0;
    KahanSum t;
    double last_rec_t = -kInf;

    const auto record = [&](double tv, double uv, double Gv) {
        const double R = std::sqrt(uv);
        const double H = Gv / (2.0 * R);
        const double A2 = norm_A_squared(metric, m, R);
        if (!traj.samples.empty() && traj.samples.back().t == tv)
            traj.samples.back() = {tv, R, H, A2}; // sub-ulp step: keep latest state
        else
            traj.samples.push_back({tv, R, H, A2});
        last_rec_t = tv;
    };

    double G_cur = G(u);
    record(0.0, u, G_cur);
    if (G_cur >= 0.0 || std::abs(G_cur) < stall_G_threshold(R0)) {
        traj.status = FlowStatus::Stalled;
        traj.t_end = 0.0;
        return traj;
    }

    // u shrinks at most ~0.5% per accepted step: keeps the Hermite dense
    // output accurate and samples the collapse geometrically in R.
    constexpr double kDecay = 0.005;
    const double G_scale = std::abs(G_cur);
    double dt = 1e-3 * u / std::abs(G_cur);
    long steps = 0;
    long probe_cooldown = 0;
    traj.status = FlowStatus::MaxStepsExceeded;

    while (steps < opts.max_steps) {
        ++steps;
        dt = std::min(dt, kDecay * u / std::abs(G_cur));
        const auto step = dp45_try(G, u, G_cur, dt);
        if (!step) {
            dt *= 0.5;
            if (!(dt > 0.0))
                throw Error("flow integrator step size collapsed to zero");
            continue;
        }
        const double tol =
            opts.abs_tol + opts.rel_tol * std::max(std::abs(u), std::abs(step->u_new));
        if (step->error > tol) {
            dt *= std::clamp(0.9 * std::pow(tol / step->error, 0.2), 0.2, 1.0);
            continue;
        }
        t.add(dt);
        u = step->u_new;
        if (u <= u_stop) {
            G_cur = G(u);
            record(t.value(), u, G_cur);
            traj.status = FlowStatus::Collapsed;
            break;
        }
        G_cur = G(u);
        const double tv = t.value();
        if (opts.output_stride <= 0.0 || tv - last_rec_t >= opts.output_stride ||
            u <= u_dense)
            record(tv, u, G_cur);
        if (G_cur >= 0.0 || std::abs(G_cur) < stall_G_threshold(std::sqrt(u))) {
            if (last_rec_t != tv)
                record(tv, u, G_cur);
            traj.status = FlowStatus::Stalled;
            break;
        }
        if (std::abs(G_cur) < 1e-8 * (1.0 + G_scale) && probe_cooldown <= 0) {
            probe_cooldown = 256;
            if (const auto u_star = refine_stall_point(G, u)) {
                u = *u_star;
                G_cur = G(u);
                record(tv, u, G_cur);
                traj.status = FlowStatus::Stalled;
                break;
            }
        }
        --probe_cooldown;
        dt *= std::clamp(0.9 * std::pow(tol / std::max(step->error, 1e-300), 0.2),
                         0.2, 5.0);
    }
    traj.t_end = t.value();
    if (traj.status == FlowStatus::MaxStepsExceeded &&
        traj.samples.back().t != traj.t_end)
        record(traj.t_end, u, G_cur);
    return traj;
}

double singularity_time_quadrature(const RadialMetric& metric, int m, double R0)
{
    if (!(R0 > 0.0))
        throw OutOfRangeError("quadrature requires R0 > 0");
    const auto integrand = [&](double R) -> double {
        const double RH = radius_times_H(metric, m, R * R);
        if (RH >= 0.0)
            throw StallError("H >= 0 at R = " + std::to_string(R) +
                             ": collapse integral undefined");
        return -R / RH; // -1/H, smooth through R = 0
    };
    return integrate_adaptive(integrand, 0.0, R0, 1e-13, 1e-13);
}

AsymptoticConstants asymptotic_constants(const RadialMetric& metric, int m)
{
    if (m < 2)
        throw OutOfRangeError("complex dimension m must be >= 2");
    if (metric.is_flat()) {
        // R*H = -1 and R^2 |A|^2 = 2m-1 exactly.
        return {1.0, 2.0 * m - 1.0, 0.5 * (2.0 * m - 1.0)};
    }
    const double gS0 = eval_g_jet(*metric.potential_expr(), 0.0).v1;
    if (!(gS0 > 0.0))
        throw InvalidPotentialError(
            "asymptotic constants need g_S(0) > 0, got g_S(0) = " +
            std::to_string(gS0));
    const double root = std::sqrt(gS0);
    const double c = 1.0 / ((2.0 * m - 1.0) * root);
    const double W0 = 1.0 / gS0;
    return {c, W0, 0.5 * (2.0 * m - 1.0) / root};
}

SingularityReport classify(const RadialMetric& metric, int m, double R0,
                           const Trajectory& traj,
                           std::optional<double> closed_form)
{
    if (traj.status != FlowStatus::Collapsed)
        throw NotCollapsedError("classification requires a collapsed trajectory");
    if (traj.samples.size() < 4)
        throw NotCollapsedError("trajectory too short to classify");

    const auto& samples = traj.samples;
    const double t_ref = samples.back().t;
    const double R_end = samples.back().R;

    // Remaining time past the final sample from a least-squares line fit over
    // the last decade in R: u is asymptotically linear in t, so fit
    // tau = p + q u with tau = t - t_ref (q = -1/(2c) < 0, delta = p).
    // Regressing tau on u keeps the t-side ulp quantization noise on the
    // dependent variable, where it averages out instead of biasing the slope.
    double delta_rem, slope_mag; // slope_mag = |du/dt| near collapse
    {
        double s_u = 0, s_tau = 0, s_uu = 0, s_ut = 0;
        long n = 0;
        for (const auto& s : samples) {
            if (s.R > 10.0 * R_end)
                continue;
            const double tau = s.t - t_ref;
            const double uv = s.R * s.R;
            s_u += uv;
            s_tau += tau;
            s_uu += uv * uv;
            s_ut += uv * tau;
            ++n;
        }
        const double denom = n * s_uu - s_u * s_u;
        if (n >= 5 && denom > 0.0) {
            const double q = (n * s_ut - s_u * s_tau) / denom;
            const double p = (s_tau - q * s_u) / n;
            delta_rem = p;
            slope_mag = q < 0.0 ? -1.0 / q : 0.0;
        } else {
            const auto& last = samples.back();
            slope_mag = 2.0 * last.R * std::abs(last.H);
            delta_rem = (last.R * last.R) / slope_mag;
        }
        if (!(delta_rem >= 0.0))
            delta_rem = 0.0;
        if (!(slope_mag > 0.0))
            slope_mag = 2.0 * R_end * std::abs(samples.back().H);
    }

    SingularityReport rep;
    rep.T_sing_trajectory = t_ref + delta_rem;
    rep.T_sing_quadrature = singularity_time_quadrature(metric, m, R0);
    rep.T_sing_closed_form = closed_form;

    const auto consts = asymptotic_constants(metric, m);
    rep.limit_predicted = consts.limit_predicted;
    rep.c_constant = -consts.c;

    // (T - t_i): time-based while far above the ulp quantization of t, else
    // from the fitted tail slope, where u (exact at every sample) gives the
    // remaining time as u/|du/dt| with O(u) relative error.
    const double t_quant =
        1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, t_ref);
    const auto product = [&](const TrajectorySample& s) {
        const double back = t_ref - s.t;
        const double remaining =
            back > t_quant ? delta_rem + back : (s.R * s.R) / slope_mag;
        return remaining * s.A_sq;
    };

    rep.max_product = 0.0;
    for (const auto& s : samples)
        rep.max_product = std::max(rep.max_product, product(s));

    // Convergence window: a decade of R where (T-t) is far above time
    // round-off but the O(R) tail corrections are already small.
    const double scale = std::max(1.0, R0);
    double win_hi = std::max(1e3 * R_end, 1e-4 * scale);
    win_hi = std::min(win_hi, R0 / 3.0);
    const double win_lo = std::max(win_hi / 10.0, 1.5 * R_end);
    std::vector<double> window;
    for (const auto& s : samples)
        if (s.R >= win_lo && s.R <= win_hi)
            window.push_back(product(s));
    if (window.size() < 4) {
        window.clear();
        const std::size_t from = samples.size() - std::max<std::size_t>(4, samples.size() / 4);
        for (std::size_t i = from; i + 1 < samples.size(); ++i)
            window.push_back(product(samples[i]));
    }

    std::vector<double> sorted = window;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double spread = (sorted.back() - sorted.front()) / std::abs(median);
    rep.limit_estimate = median;

    if (std::isfinite(median) && spread < 0.05) {
        rep.type_verdict = SingularityType::TypeI;
    } else {
        bool increasing = true;
        for (std::size_t i = 1; i < window.size(); ++i)
            if (window[i] <= window[i - 1])
                increasing = false;
        if (increasing && window.back() > 10.0 * rep.limit_predicted)
            rep.type_verdict = SingularityType::TypeII;
        else
            rep.type_verdict = SingularityType::Inconclusive;
    }
    return rep;
}

std::vector<double> blow_up_locus_scan(const RadialMetric& metric, int m,
                                       double R_max, int samples,
                                       double threshold)
{
    if (!(R_max > 0.0) || samples < 2)
        throw OutOfRangeError("scan requires R_max > 0 and samples >= 2");
    std::vector<double> flagged;
    const double lg_hi = std::log(R_max);
    const double lg_lo = lg_hi - 6.0 * std::log(10.0);
    for (int k = 0; k < samples; ++k) {
        const double R = std::exp(lg_lo + (lg_hi - lg_lo) * k / (samples - 1));
        if (norm_A_squared(metric, m, R) > threshold)
            flagged.push_back(R);
    }
    return flagged;
}

} // namespace mcf
