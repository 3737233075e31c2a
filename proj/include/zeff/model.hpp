#pragma once

#include "zeff/function_spec.hpp"

namespace zeff {

/// The bare theory: field-dependent kinetic coefficient Z(phi), potential
/// V(phi), and the loop-counting constant hbar.
class ScalarFieldModel {
 public:
  ScalarFieldModel(FunctionSpec z, FunctionSpec v, double hbar = 1.0);

  const FunctionSpec& z() const { return z_; }
  const FunctionSpec& v() const { return v_; }
  double hbar() const { return hbar_; }

  DerivativeBundle z_bundle(double phi0) const { return z_.eval(phi0); }
  DerivativeBundle v_bundle(double phi0) const { return v_.eval(phi0); }

  /// Same bare functions with a different hbar (corrections are linear in it).
  ScalarFieldModel with_hbar(double hbar) const {
    return ScalarFieldModel(z_, v_, hbar);
  }

  bool operator==(const ScalarFieldModel& other) const {
    return z_ == other.z_ && v_ == other.v_ && hbar_ == other.hbar_;
  }

 private:
  FunctionSpec z_;
  FunctionSpec v_;
  double hbar_;
};

}  // namespace zeff
