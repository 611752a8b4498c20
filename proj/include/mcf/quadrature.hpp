#ifndef MCF_QUADRATURE_HPP
#define MCF_QUADRATURE_HPP

#include <functional>

namespace mcf {

/// Adaptive Gauss-Kronrod 7(15) integration of f over [a, b]. Bisects until
/// the per-interval error estimate satisfies abs_tol + rel_tol*|whole|.
/// Nodes are interior, so f is never evaluated at the endpoints.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol = 1e-13,
                          double rel_tol = 1e-13);

} // namespace mcf

#endif // MCF_QUADRATURE_HPP
