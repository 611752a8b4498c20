#ifndef MCF_CURVATURE_HPP
#define MCF_CURVATURE_HPP

#include <optional>

#include "mcf/potential.hpp"

namespace mcf {

/// U(m)-invariant radial Kahler model on C^m \ {0}: either f = log S + g(S)
/// with a parsed potential g, or the flat override f = S (the Euclidean
/// metric, reachable even though g = S - log S has no finite g-jet at 0).
class RadialMetric {
public:
    static RadialMetric potential(PotentialExpr g)
    {
        return RadialMetric(std::move(g));
    }
    static RadialMetric flat() { return RadialMetric(); }

    bool is_flat() const { return !g_.has_value(); }
    const PotentialExpr* potential_expr() const
    {
        return g_ ? &*g_ : nullptr;
    }

    /// The combinations every curvature formula is built from, evaluated
    /// without the 1/S cancellations of raw f-jets (they reduce to pure
    /// g-jet expressions: mu_sq = g_S + S g_SS, N = g_S + 3S g_SS + S^2 g_SSS,
    /// B = S f_S = 1 + S g_S), so they stay accurate down to S ~ 1e-16.
    struct Terms {
        double S;
        double mu_sq; // f_S + S f_SS
        double N;     // f_S + 3 S f_SS + S^2 f_SSS
        double B;     // S f_S
    };
    Terms terms_at_S(double S) const;

private:
    RadialMetric() = default;
    explicit RadialMetric(PotentialExpr g) : g_(std::move(g)) {}
    std::optional<PotentialExpr> g_;
};

/// Diagonal metric frame of the hypersphere S = R^2: eta^2 = f_S on the
/// 2m-2 horizontal directions, mu^2 = f_S + S f_SS on J(n) and n.
struct FrameData {
    double eta_sq;
    double mu_sq;
    int m;
    double S;
    double R;
};

/// eta^2, mu^2 through eval_f_jet, per the module contract. Throws
/// NotPositiveError when either coefficient fails metric positivity.
FrameData frame(const PotentialExpr& g, int m, double R);

struct PrincipalCurvatures {
    double lambda_tan;  // common value of lambda_1 .. lambda_{2m-2}
    double lambda_last; // lambda_{2m-1}
};

/// lambda_tan = -sqrt(f_S + S f_SS)/(f_S sqrt(S)),
/// lambda_last = -(f_S + 3S f_SS + S^2 f_SSS)/((f_S + S f_SS)^{3/2} sqrt(S)).
PrincipalCurvatures principal_curvatures(const RadialMetric& metric, int m, double R);

/// Average of the 2m-1 principal curvatures, by the closed form
/// H = -((2m-2)(f_S+S f_SS)^2 + f_S(f_SSS S^2 + 3S f_SS + f_S))
///     / ((2m-1)(f_S+S f_SS)^{3/2} sqrt(S) f_S).
double mean_curvature(const RadialMetric& metric, int m, double R);

/// |A|^2 = (2m-2) lambda_tan^2 + lambda_last^2, by the closed form.
double norm_A_squared(const RadialMetric& metric, int m, double R);

/// R*H as a function of S = R^2. Analytic through S = 0 (tends to
/// -1/((2m-1) sqrt(g_S(0)))), which makes u = R^2 the regular variable for
/// the collapse ODE: du/dt = 2 R H = 2 * radius_times_H(S=u).
double radius_times_H(const RadialMetric& metric, int m, double S);

struct CurvatureSample {
    double R;
    double lambda_tan;
    double lambda_last;
    double H;
    double A_sq;
};

CurvatureSample curvature_sample(const RadialMetric& metric, int m, double R);

// PotentialExpr convenience overloads (f = log S + g).
PrincipalCurvatures principal_curvatures(const PotentialExpr& g, int m, double R);
double mean_curvature(const PotentialExpr& g, int m, double R);
double norm_A_squared(const PotentialExpr& g, int m, double R);

struct SecondFormDiag {
    double pi_tan;  // multiplicity d-1
    double pi_last;
};

/// Diagonal entries of the second fundamental form when Pi(g_0) = tau g_0:
/// pi_tan = eta^2 tau / A + eta dn_eta / A, pi_last = mu^2 tau / A + mu dn_mu / A.
/// Shape-operator eigenvalues are pi_tan/eta^2 and pi_last/mu^2.
SecondFormDiag second_fundamental_form_diag(double eta, double mu, double A,
                                            double tau, double dn_eta,
                                            double dn_mu, int d);

} // namespace mcf

#endif // MCF_CURVATURE_HPP
