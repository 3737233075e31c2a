#pragma once

#include <span>
#include <vector>

#include "zeff/model.hpp"

namespace zeff {

/// Periodic time lattice holding one background path: M slices over total
/// period T, values phi_0..phi_{M-1} with phi_M identified with phi_0.
class LatticePath {
 public:
  LatticePath(double period, std::vector<double> values);

  static LatticePath constant(double period, int slices, double phi0);
  /// phi_i = phi0 + eps * sin(Omega t_i) with Omega = 2 pi mode / period.
  static LatticePath sinusoid(double period, int slices, double phi0,
                              double eps, int mode);

  double period() const { return period_; }
  int slices() const { return static_cast<int>(values_.size()); }
  double spacing() const { return period_ / slices(); }
  const std::vector<double>& values() const { return values_; }

 private:
  double period_;
  std::vector<double> values_;
};

/// Second-variation operator on the periodic lattice: symmetric cyclic
/// tridiagonal (tridiagonal plus the two corner couplings).
class FluctuationOperator {
 public:
  FluctuationOperator(std::vector<double> diagonal,
                      std::vector<double> off_diagonal);

  int size() const { return static_cast<int>(diag_.size()); }
  double diagonal(int i) const { return diag_[i]; }
  /// Coupling between sites i and (i+1) mod M; index M-1 is the corner.
  double off_diagonal(int i) const { return off_[i]; }

  std::vector<double> apply(std::span<const double> x) const;

  bool is_positive_definite() const;
  /// log det via a symmetric bordered factorization of the cyclic band
  /// structure, O(M).  Throws DomainError ("unstable background", smallest
  /// eigenvalue reported) when the operator is not positive definite.
  double log_det() const;
  /// Smallest eigenvalue by bisection on the factorization's inertia.
  double smallest_eigenvalue() const;

 private:
  std::vector<double> diag_;
  std::vector<double> off_;
};

/// Discretizes the Euclidean second variation
///   -d/dt (Z(phi) d/dt) + V''(phi) + 1/2 Z''(phi) phidot^2 - d/dt(Z'(phi) phidot)
/// on the periodic lattice: conservative stencil with arithmetic-mean Z on
/// half-grid links, time derivatives by central differences.
FluctuationOperator discretize_operator(const ScalarFieldModel& model,
                                        const LatticePath& path);

/// One-loop action difference
///   Gamma_1 = (hbar/2) (log det K[path] - log det K[constant phi0])
/// with the reference subtraction cancelling the path-independent
/// divergence.  Both operators must be positive definite.
double one_loop_action(const ScalarFieldModel& model, const LatticePath& path,
                       double reference_phi0);

}  // namespace zeff
