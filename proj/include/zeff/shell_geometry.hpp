#pragma once

#include <utility>

#include "zeff/model.hpp"

namespace zeff {

/// Sign-symmetric momentum shell {p : |p| in [k_c - dk, k_c]}, total
/// length 2 dk.
struct ShellSpec {
  double k_c = 0.0;
  double dk = 0.0;

  ShellSpec(double outer_edge, double thickness);

  double inner() const { return k_c - dk; }
  double outer() const { return k_c; }
};

/// Delta-constrained double integral over the shell, with the contribution
/// split by sector (sign combination of p and p') and by delta branch
/// (p + p' = +q versus p + p' = -q).
struct ConstrainedIntegralResult {
  double q = 0.0;
  double value = 0.0;
  double sector_opposite = 0.0;
  double sector_same = 0.0;
  double branch_plus = 0.0;
  double branch_minus = 0.0;
};

/// Exact 1D measure of {p in shell : q - p in shell} by interval
/// intersection; piecewise linear in q.  For |q| <= dk << k_c the
/// opposite-sign sectors give 2 (dk - |q|); the measure vanishes for
/// dk < |q| < 2 (k_c - dk); a same-sign triangle of half-width dk peaks
/// at |q| = 2 k_c - dk.
double delta_constrained_measure(const ShellSpec& shell, double q);

/// F(q): the sum-constrained shell integral
///
///   (V''')^2/4 * int int_{shell^2} dp/(2pi) dp'/(2pi)
///       [delta(p+p'+q) + delta(p+p'-q)] / (G(p) G(p')) + h.c.
///
/// with G(p) = Z(phi0) p^2 + V''(phi0), one delta eliminated analytically
/// (p' = +-q - p intersected with the shell) and the surviving 1D integral
/// evaluated by adaptive quadrature.  The h.c. is an overall factor 2 on
/// the real integrand.  Exactly zero whenever the deformed domain is empty,
/// in particular for dk <= |q| <= 2 (k_c - dk).
ConstrainedIntegralResult f_of_q(const ScalarFieldModel& model, double phi0,
                                 const ShellSpec& shell, double q);

/// Contrasts integrating the sum constraint over the full square [0,L]^2
/// with summing over the diagonal blocks [j dk, (j+1) dk]^2: returns
/// (I_full, I_blocks) where
///   I_full   = measure{p in [0,L] : |q| - p in [0,L]}
///   I_blocks = sum_j measure{p in B_j : |q| - p in B_j}
/// Always I_full >= I_blocks.  Requires dk to divide L (within rounding).
std::pair<double, double> full_range_vs_shell_sum(double Lambda, double dk,
                                                  double q);

}  // namespace zeff
