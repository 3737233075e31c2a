#pragma once

#include <vector>

#include "zeff/field_grid.hpp"
#include "zeff/model.hpp"

namespace zeff {

enum class Method { DerivativeExpansion, ErgOneLoop };

/// The four numerical coefficients multiplying the one-loop correction
/// structures
///
///   s1 = (V''')^2 Z^{1/2} / (V'')^{5/2}
///   s2 = V''' Z' / (Z^{1/2} (V'')^{3/2})
///   s3 = (Z')^2 / (Z^{3/2} (V'')^{1/2})
///   s4 = Z'' / (Z^{1/2} (V'')^{1/2})
///
/// The default set is the derivative-expansion result; alternative published
/// coefficient sets can be supplied by the caller.
struct CorrectionCoefficients {
  double c1 = 1.0 / 32.0;
  double c2 = -3.0 / 16.0;
  double c3 = -7.0 / 32.0;
  double c4 = 1.0 / 4.0;
  bool operator==(const CorrectionCoefficients&) const = default;
};

/// One-loop effective kinetic coefficient at a point, with the per-term
/// breakdown. Signs and the hbar factor are folded into each term so that
/// z_eff = z_bare + t1 + t2 + t3 + t4 holds literally.
struct ZEffSample {
  double phi0 = 0.0;
  double z_bare = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  double z_eff = 0.0;
  Method method = Method::DerivativeExpansion;
};

/// Per-point table of both closed-form methods over a grid; difference is
/// derivative-expansion minus ERG one-loop, which equals t1 + t2 + t3.
struct MethodComparison {
  FieldGrid grid;
  std::vector<ZEffSample> derivative_expansion;
  std::vector<ZEffSample> erg_oneloop;
  std::vector<double> difference;
};

/// Closed-form derivative-expansion Z_eff.  Requires Z(phi0) > 0 and
/// V''(phi0) > 0; throws DomainError otherwise.
ZEffSample z_eff_derivative_expansion(const ScalarFieldModel& model,
                                      double phi0);

/// Same structure with a user-supplied coefficient quadruple.
ZEffSample z_eff_derivative_expansion(const ScalarFieldModel& model,
                                      double phi0,
                                      const CorrectionCoefficients& coeffs);

/// One-loop solution of the exact-RG flow: only the Z'' term survives.
ZEffSample z_eff_erg_oneloop(const ScalarFieldModel& model, double phi0);

MethodComparison compare_methods(const ScalarFieldModel& model,
                                 const FieldGrid& grid);

}  // namespace zeff
