#pragma once

#include <functional>

namespace zeff {

/// Adaptive Gauss-Kronrod integration over a finite interval.  Throws
/// ConvergenceError when the subdivision budget is exhausted before the
/// requested relative tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol);

/// Integral over (a, infinity), a > 0, via the u = 1/k substitution:
/// the caller provides the already-substituted integrand
/// g(u) = f(1/u) / u^2, smooth on (0, 1/a].
double integrate_tail(const std::function<double(double)>& g, double a,
                      double rel_tol);

}  // namespace zeff
