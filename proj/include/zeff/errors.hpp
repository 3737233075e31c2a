#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace zeff {

/// A computation left the region where its formulas are defined
/// (e.g. Z <= 0, V'' <= 0, or a non-positive fluctuation operator).
/// Carries the field value at which the violation occurred when known.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg,
                       double phi = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(msg), phi_(phi) {}

  double phi() const { return phi_; }
  bool has_phi() const { return !std::isnan(phi_); }

 private:
  double phi_;
};

/// An iterative numerical procedure failed to reach its tolerance
/// (quadrature subdivision exhausted, step underflow, step budget hit).
class ConvergenceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace zeff
