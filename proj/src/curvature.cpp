#include "mcf/curvature.hpp"

#include <cmath>
#include <string>

namespace mcf {

namespace {

void require_m(int m)
{
    if (m < 2)
        throw OutOfRangeError("complex dimension m must be >= 2");
}

void require_R(double R)
{
    if (!(R > 0.0) || !std::isfinite(R))
        throw OutOfRangeError("radius R must be positive and finite");
}

/// mu^2 > 0 and B = S f_S > 0, else the metric is degenerate at this radius.
void require_positive(const RadialMetric::Terms& t)
{
    if (!(t.mu_sq > 0.0))
        throw NotPositiveError("mu^2 = f_S + S f_SS <= 0 at S = " + std::to_string(t.S) +
                               ": metric degenerate at this radius");
    if (!(t.B > 0.0))
        throw NotPositiveError("f_S <= 0 at S = " + std::to_string(t.S) +
                               ": metric degenerate at this radius");
}

} // namespace

RadialMetric::Terms RadialMetric::terms_at_S(double S) const
{
    if (!(S >= 0.0))
        throw DomainError("terms_at_S requires S >= 0");
    if (is_flat()) {
        // f = S: f_S = 1, f_SS = f_SSS = 0.
        return {S, 1.0, 1.0, S};
    }
    const Jet3 g = eval_g_jet(*g_, S);
    Terms t;
    t.S = S;
    t.mu_sq = g.v1 + S * g.v2;
    t.N = g.v1 + 3.0 * S * g.v2 + S * S * g.v3;
    t.B = 1.0 + S * g.v1;
    return t;
}

FrameData frame(const PotentialExpr& g, int m, double R)
{
    require_m(m);
    require_R(R);
    const double S = R * R;
    const Jet3 f = eval_f_jet(g, S);
    FrameData fd;
    fd.eta_sq = f.v1;
    fd.mu_sq = f.v1 + S * f.v2;
    fd.m = m;
    fd.S = S;
    fd.R = R;
    if (!(fd.eta_sq > 0.0))
        throw NotPositiveError("eta^2 = f_S <= 0 at R = " + std::to_string(R));
    if (!(fd.mu_sq > 0.0))
        throw NotPositiveError("mu^2 = f_S + S f_SS <= 0 at R = " + std::to_string(R));
    return fd;
}

PrincipalCurvatures principal_curvatures(const RadialMetric& metric, int m, double R)
{
    require_m(m);
    require_R(R);
    const auto t = metric.terms_at_S(R * R);
    require_positive(t);
    const double mu = std::sqrt(t.mu_sq);
    // lambda_tan = -mu/(f_S sqrt(S)) = -mu R / B with B = S f_S.
    return {-mu * R / t.B, -t.N / (t.mu_sq * mu * R)};
}

double mean_curvature(const RadialMetric& metric, int m, double R)
{
    require_m(m);
    require_R(R);
    const auto t = metric.terms_at_S(R * R);
    require_positive(t);
    const double mu = std::sqrt(t.mu_sq);
    const double num = (2.0 * m - 2.0) * t.mu_sq * t.mu_sq * t.S + t.B * t.N;
    return -num / ((2.0 * m - 1.0) * t.B * t.mu_sq * mu * R);
}

double norm_A_squared(const RadialMetric& metric, int m, double R)
{
    require_m(m);
    require_R(R);
    const auto t = metric.terms_at_S(R * R);
    require_positive(t);
    const double mu4 = t.mu_sq * t.mu_sq;
    const double num = (2.0 * m - 2.0) * mu4 * mu4 * t.S * t.S + t.B * t.B * t.N * t.N;
    return num / (t.B * t.B * mu4 * t.mu_sq * t.S);
}

double radius_times_H(const RadialMetric& metric, int m, double S)
{
    require_m(m);
    if (metric.is_flat()) {
        // -((2m-2)S + S)/((2m-1)S) reduces to -1 for all S, including S = 0.
        if (!(S >= 0.0))
            throw DomainError("radius_times_H requires S >= 0");
        return -1.0;
    }
    const auto t = metric.terms_at_S(S);
    require_positive(t);
    const double mu = std::sqrt(t.mu_sq);
    const double num = (2.0 * m - 2.0) * t.mu_sq * t.mu_sq * t.S + t.B * t.N;
    return -num / ((2.0 * m - 1.0) * t.B * t.mu_sq * mu);
}

CurvatureSample curvature_sample(const RadialMetric& metric, int m, double R)
{
    const auto pc = principal_curvatures(metric, m, R);
    return {R, pc.lambda_tan, pc.lambda_last, mean_curvature(metric, m, R),
            norm_A_squared(metric, m, R)};
}

PrincipalCurvatures principal_curvatures(const PotentialExpr& g, int m, double R)
{
    return principal_curvatures(RadialMetric::potential(g), m, R);
}

double mean_curvature(const PotentialExpr& g, int m, double R)
{
    return mean_curvature(RadialMetric::potential(g), m, R);
}

double norm_A_squared(const PotentialExpr& g, int m, double R)
{
    return norm_A_squared(RadialMetric::potential(g), m, R);
}

SecondFormDiag second_fundamental_form_diag(double eta, double mu, double A,
                                            double tau, double dn_eta,
                                            double dn_mu, int d)
{
    if (d < 2)
        throw OutOfRangeError("hypersurface dimension d must be >= 2");
    if (!(eta > 0.0) || !(mu > 0.0) || !(A > 0.0))
        throw NotPositiveError("second_fundamental_form_diag requires eta, mu, A > 0");
    const double invA = 1.0 / A;
    return {eta * eta * invA * tau + eta * invA * dn_eta,
            mu * mu * invA * tau + mu * invA * dn_mu};
}

} // namespace mcf
