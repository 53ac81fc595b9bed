#ifndef IBOOPT_QUADRATURE_HPP
#define IBOOPT_QUADRATURE_HPP

#include <functional>

namespace iboopt {

/// Adaptive Gauss-Kronrod (G7, K15) integration of f over [a, b] by interval
/// bisection until the accumulated error estimate is below abs_tol.
/// Throws std::runtime_error when the subdivision budget is exhausted.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-9);

} // namespace iboopt

#endif
