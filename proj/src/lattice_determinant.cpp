#include "zeff/lattice_determinant.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "zeff/errors.hpp"

namespace zeff {

LatticePath::LatticePath(double period, std::vector<double> values)
    : period_(period), values_(std::move(values)) {
  if (!(period > 0.0) || !std::isfinite(period))
    throw std::invalid_argument("lattice period must be positive");
  if (values_.size() < 8)
    throw std::invalid_argument("lattice path requires M >= 8 slices");
  for (double v : values_)
    if (!std::isfinite(v))
      throw std::invalid_argument("lattice path value is not finite");
}

LatticePath LatticePath::constant(double period, int slices, double phi0) {
  return LatticePath(period, std::vector<double>(slices, phi0));
}

LatticePath LatticePath::sinusoid(double period, int slices, double phi0,
                                  double eps, int mode) {
  if (mode < 1) throw std::invalid_argument("sinusoid mode must be >= 1");
  std::vector<double> v(slices);
  const double omega = 2.0 * std::numbers::pi * mode / period;
  const double a = period / slices;
  for (int i = 0; i < slices; ++i) v[i] = phi0 + eps * std::sin(omega * a * i);
  return LatticePath(period, std::move(v));
}

FluctuationOperator::FluctuationOperator(std::vector<double> diagonal,
                                         std::vector<double> off_diagonal)
    : diag_(std::move(diagonal)), off_(std::move(off_diagonal)) {
  if (diag_.size() < 3 || off_.size() != diag_.size())
    throw std::invalid_argument("cyclic tridiagonal needs size >= 3 and "
                                "matching off-diagonal length");
}

std::vector<double> FluctuationOperator::apply(std::span<const double> x) const {
  const int m = size();
  if (static_cast<int>(x.size()) != m)
    throw std::invalid_argument("apply: vector length mismatch");
  std::vector<double> y(m);
  for (int i = 0; i < m; ++i) {
    const int prev = (i + m - 1) % m;
    const int next = (i + 1) % m;
    y[i] = diag_[i] * x[i] + off_[prev] * x[prev] + off_[i] * x[next];
  }
  return y;
}

namespace {

// Bordered factorization of the cyclic tridiagonal K = [[T, u],[u^T, d]]:
// LDL^T pivots of the leading tridiagonal T, then the Schur complement
// d - u^T T^{-1} u.  Returns false (leaving log_det unset) as soon as a
// pivot fails to be positive.
bool factor_log_det(const std::vector<double>& diag,
                    const std::vector<double>& off, double shift,
                    double* log_det) {
  const int m = static_cast<int>(diag.size());
  const int n = m - 1;  // dimension of T
  std::vector<double> pivot(n), c(n, 0.0);
  // u has entries only at 0 (corner) and n-1
  c[0] = off[m - 1];
  if (n >= 2) c[n - 1] += off[n - 1];

  double sum_log = 0.0;
  double schur = diag[m - 1] - shift;
  double prev_pivot = 0.0;
  for (int i = 0; i < n; ++i) {
    double p = diag[i] - shift;
    if (i > 0) {
      const double l = off[i - 1] / prev_pivot;
      p -= l * off[i - 1];
      c[i] -= l * c[i - 1];
    }
    if (!(p > 0.0)) return false;  // non-positive or NaN pivot
    pivot[i] = p;
    prev_pivot = p;
    sum_log += std::log(p);
    schur -= c[i] * c[i] / p;
  }
  if (!(schur > 0.0)) return false;
  if (log_det) *log_det = sum_log + std::log(schur);
  return true;
}

}  // namespace

bool FluctuationOperator::is_positive_definite() const {
  return factor_log_det(diag_, off_, 0.0, nullptr);
}

double FluctuationOperator::smallest_eigenvalue() const {
  // Gershgorin bracket, then bisection on positive definiteness of K - s I.
  double lo = diag_[0], hi = diag_[0];
  const int m = size();
  for (int i = 0; i < m; ++i) {
    const double radius =
        std::abs(off_[(i + m - 1) % m]) + std::abs(off_[i]);
    lo = std::min(lo, diag_[i] - radius);
    hi = std::max(hi, diag_[i] + radius);
  }
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * scale; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (factor_log_det(diag_, off_, mid, nullptr))
      lo = mid;  // K - mid I still positive definite: lambda_min > mid
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double FluctuationOperator::log_det() const {
  double value = 0.0;
  if (!factor_log_det(diag_, off_, 0.0, &value))
    throw DomainError("unstable background: fluctuation operator is not "
                      "positive definite, smallest eigenvalue = " +
                      std::to_string(smallest_eigenvalue()));
  return value;
}

FluctuationOperator discretize_operator(const ScalarFieldModel& model,
                                        const LatticePath& path) {
  const int m = path.slices();
  const double a = path.spacing();
  const auto& phi = path.values();

  std::vector<DerivativeBundle> z(m);
  std::vector<double> w(m), phidot(m), zp_phidot(m);
  for (int i = 0; i < m; ++i) z[i] = model.z_bundle(phi[i]);
  for (int i = 0; i < m; ++i) {
    const int prev = (i + m - 1) % m;
    const int next = (i + 1) % m;
    phidot[i] = (phi[next] - phi[prev]) / (2.0 * a);
  }
  for (int i = 0; i < m; ++i) zp_phidot[i] = z[i].f1 * phidot[i];
  for (int i = 0; i < m; ++i) {
    const int prev = (i + m - 1) % m;
    const int next = (i + 1) % m;
    const double d_zp_phidot = (zp_phidot[next] - zp_phidot[prev]) / (2.0 * a);
    w[i] = model.v_bundle(phi[i]).f2 + 0.5 * z[i].f2 * phidot[i] * phidot[i] -
           d_zp_phidot;
  }

  std::vector<double> diag(m), off(m);
  const double inv_a2 = 1.0 / (a * a);
  for (int i = 0; i < m; ++i) {
    const int next = (i + 1) % m;
    off[i] = -0.5 * (z[i].f0 + z[next].f0) * inv_a2;  // half-link Z average
  }
  for (int i = 0; i < m; ++i) {
    const int prev = (i + m - 1) % m;
    diag[i] = -(off[prev] + off[i]) + w[i];
  }
  return FluctuationOperator(std::move(diag), std::move(off));
}

double one_loop_action(const ScalarFieldModel& model, const LatticePath& path,
                       double reference_phi0) {
  const FluctuationOperator k_path = discretize_operator(model, path);
  const FluctuationOperator k_ref = discretize_operator(
      model, LatticePath::constant(path.period(), path.slices(), reference_phi0));
  return 0.5 * model.hbar() * (k_path.log_det() - k_ref.log_det());
}

}  // namespace zeff
