#ifndef MCF_ORACLES_HPP
#define MCF_ORACLES_HPP

namespace mcf::oracles {

/// Exact collapse time of the Burns metric (f = log S + S on Bl_0 C^2):
/// T = R0^2/2 + log(3 R0^2 + 1)/3.
double burns_T_sing(double R0);

/// Radius at time t from the implicit Burns solution
///   R^2/2 + log(3R^2+1)/3 = T_sing - t,
/// solved by bisection on the strictly increasing left-hand side to
/// absolute accuracy 1e-12. Requires 0 <= t <= burns_T_sing(R0).
double burns_radius(double R0, double t);

/// Round sphere in the flat metric f = S: R(t) = sqrt(R0^2 - 2t) under the
/// averaged-H convention (independent of m). Requires 0 <= t <= R0^2/2.
double flat_radius(double R0, double t, int m);

} // namespace mcf::oracles

#endif // MCF_ORACLES_HPP
