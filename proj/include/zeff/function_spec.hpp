#pragma once

#include <map>
#include <string>
#include <vector>

namespace zeff {

/// Value and first three derivatives of a function at one point.
struct DerivativeBundle {
  double f0 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;

  bool all_finite() const;
};

/// A one-dimensional function of the field, either an explicit polynomial
/// (coefficients in ascending powers, degree <= 12) or one of the builtin
/// families:
///
///   harmonic     V(phi) = m2/2 * phi^2             params: m2 (default 1)
///   quartic      V(phi) = m2/2 * phi^2 + g/4 phi^4 params: m2, g (default 1)
///   z-quadratic  Z(phi) = 1 + g * phi^2            params: g (default 1)
///
/// Derivatives are taken analytically from the coefficient list.
class FunctionSpec {
 public:
  enum class Kind { Polynomial, Named };

  static constexpr int kMaxDegree = 12;

  static FunctionSpec polynomial(std::vector<double> coefficients);
  static FunctionSpec named(const std::string& id,
                            const std::map<std::string, double>& params = {});

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::map<std::string, double>& params() const { return params_; }

  /// Canonical expanded polynomial coefficients (ascending powers).
  const std::vector<double>& coefficients() const { return coeffs_; }

  DerivativeBundle eval(double phi0) const;

  bool operator==(const FunctionSpec& other) const;

 private:
  FunctionSpec() = default;

  Kind kind_ = Kind::Polynomial;
  std::vector<double> coeffs_;
  std::string name_;                      // Named only
  std::map<std::string, double> params_;  // Named only, defaults filled in
};

/// Evaluates value and first three derivatives; exact for polynomials.
DerivativeBundle eval_bundle(const FunctionSpec& spec, double phi0);

}  // namespace zeff
