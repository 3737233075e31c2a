#include "zeff/closed_form.hpp"

#include <cmath>
#include <string>

#include "zeff/errors.hpp"

namespace zeff {

namespace {

struct LocalData {
  DerivativeBundle z;
  DerivativeBundle v;
};

LocalData checked_bundles(const ScalarFieldModel& model, double phi0) {
  LocalData d{model.z_bundle(phi0), model.v_bundle(phi0)};
  if (d.z.f0 <= 0.0)
    throw DomainError("Z(phi0) = " + std::to_string(d.z.f0) +
                          " <= 0 at phi0 = " + std::to_string(phi0) +
                          "; fractional powers undefined",
                      phi0);
  if (d.v.f2 <= 0.0)
    throw DomainError("V''(phi0) = " + std::to_string(d.v.f2) +
                          " <= 0 at phi0 = " + std::to_string(phi0) +
                          "; fractional powers undefined",
                      phi0);
  return d;
}

}  // namespace

ZEffSample z_eff_derivative_expansion(const ScalarFieldModel& model,
                                      double phi0) {
  return z_eff_derivative_expansion(model, phi0, CorrectionCoefficients{});
}

ZEffSample z_eff_derivative_expansion(const ScalarFieldModel& model,
                                      double phi0,
                                      const CorrectionCoefficients& c) {
  const auto [z, v] = checked_bundles(model, phi0);
  const double hbar = model.hbar();
  const double sz = std::sqrt(z.f0);
  const double sv = std::sqrt(v.f2);

  ZEffSample s;
  s.phi0 = phi0;
  s.z_bare = z.f0;
  s.method = Method::DerivativeExpansion;
  s.t1 = hbar * c.c1 * v.f3 * v.f3 * sz / (v.f2 * v.f2 * sv);
  s.t2 = hbar * c.c2 * v.f3 * z.f1 / (sz * v.f2 * sv);
  s.t3 = hbar * c.c3 * z.f1 * z.f1 / (z.f0 * sz * sv);
  s.t4 = hbar * c.c4 * z.f2 / (sz * sv);
  s.z_eff = s.z_bare + s.t1 + s.t2 + s.t3 + s.t4;
  return s;
}

ZEffSample z_eff_erg_oneloop(const ScalarFieldModel& model, double phi0) {
  const auto [z, v] = checked_bundles(model, phi0);

  ZEffSample s;
  s.phi0 = phi0;
  s.z_bare = z.f0;
  s.method = Method::ErgOneLoop;
  s.t4 = model.hbar() * 0.25 * z.f2 / (std::sqrt(z.f0) * std::sqrt(v.f2));
  s.z_eff = s.z_bare + s.t1 + s.t2 + s.t3 + s.t4;
  return s;
}

MethodComparison compare_methods(const ScalarFieldModel& model,
                                 const FieldGrid& grid) {
  MethodComparison cmp{grid, {}, {}, {}};
  const auto phis = grid.points();
  cmp.derivative_expansion.reserve(phis.size());
  cmp.erg_oneloop.reserve(phis.size());
  cmp.difference.reserve(phis.size());
  for (double phi : phis) {
    // Throws on the first grid point outside the domain; the exception
    // carries that phi.
    cmp.derivative_expansion.push_back(z_eff_derivative_expansion(model, phi));
    cmp.erg_oneloop.push_back(z_eff_erg_oneloop(model, phi));
    cmp.difference.push_back(cmp.derivative_expansion.back().z_eff -
                             cmp.erg_oneloop.back().z_eff);
  }
  return cmp;
}

}  // namespace zeff
