#include "zeff/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "zeff/errors.hpp"

namespace zeff {

namespace {
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr unsigned kMaxDepth = 15;
}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  double error = 0.0;
  double value = GK::integrate(f, a, b, kMaxDepth, rel_tol, &error);
  // error is an absolute estimate; compare against the requested relative
  // tolerance with generous slack so a benign estimate does not trip it
  double scale = std::max(std::abs(value), 1e-12);
  if (!(error <= 1e3 * rel_tol * scale))
    throw ConvergenceError("quadrature did not converge: error estimate " +
                           std::to_string(error));
  return value;
}

double integrate_tail(const std::function<double(double)>& g, double a,
                      double rel_tol) {
  return integrate(g, 0.0, 1.0 / a, rel_tol);
}

}  // namespace zeff
