#include "zeff/shell_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "zeff/errors.hpp"
#include "zeff/quadrature.hpp"

namespace zeff {

namespace {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo < hi); }
  double length() const { return empty() ? 0.0 : hi - lo; }
};

Interval intersect(const Interval& a, const Interval& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

// {p in x : s - p in y}  =  x  intersected with  s - y
Interval constrained(const Interval& x, const Interval& y, double s) {
  return intersect(x, {s - y.hi, s - y.lo});
}

constexpr double kShellQuadRelTol = 1e-10;

}  // namespace

ShellSpec::ShellSpec(double outer_edge, double thickness)
    : k_c(outer_edge), dk(thickness) {
  if (!(k_c > 0.0) || !std::isfinite(k_c))
    throw std::invalid_argument("shell requires k_c > 0");
  if (!(dk > 0.0) || !(dk <= k_c))
    throw std::invalid_argument("shell requires 0 < dk <= k_c");
}

double delta_constrained_measure(const ShellSpec& shell, double q) {
  const Interval plus{shell.inner(), shell.outer()};
  const Interval minus{-shell.outer(), -shell.inner()};
  double m = 0.0;
  for (const Interval& x : {minus, plus})
    for (const Interval& y : {minus, plus}) m += constrained(x, y, q).length();
  return m;
}

ConstrainedIntegralResult f_of_q(const ScalarFieldModel& model, double phi0,
                                 const ShellSpec& shell, double q) {
  const double z0 = model.z_bundle(phi0).f0;
  const DerivativeBundle v = model.v_bundle(phi0);
  auto G = [&](double p) { return z0 * p * p + v.f2; };
  // G is monotone in |p|; its minimum over the shell sits at the inner edge
  // for Z >= 0 and at the outer edge otherwise.
  const double g_min = std::min(G(shell.inner()), G(shell.outer()));
  if (!(g_min > 0.0))
    throw DomainError("G(p) = Z p^2 + V'' <= 0 on the shell", phi0);

  const Interval components[2] = {{-shell.outer(), -shell.inner()},
                                  {shell.inner(), shell.outer()}};

  ConstrainedIntegralResult r;
  r.q = q;
  const double inv_4pi2 = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
  // h.c. taken as an overall factor 2 on the real integrand
  const double prefactor = 2.0 * (v.f3 * v.f3 / 4.0) * inv_4pi2;

  for (int branch = 0; branch < 2; ++branch) {  // p + p' = +q, then -q
    const double s = branch == 0 ? q : -q;
    double total = 0.0;
    for (int xi = 0; xi < 2; ++xi)
      for (int yi = 0; yi < 2; ++yi) {
        const Interval dom = constrained(components[xi], components[yi], s);
        if (dom.empty()) continue;
        // boundary touches produce rounding-width slivers; measure zero
        if (dom.length() <= 64.0 * std::numeric_limits<double>::epsilon() *
                                std::max(std::abs(dom.lo), std::abs(dom.hi)))
          continue;
        auto integrand = [&](double p) { return 1.0 / (G(p) * G(s - p)); };
        const double part =
            prefactor * integrate(integrand, dom.lo, dom.hi, kShellQuadRelTol);
        total += part;
        (xi == yi ? r.sector_same : r.sector_opposite) += part;
      }
    (branch == 0 ? r.branch_plus : r.branch_minus) = total;
    r.value += total;
  }
  return r;
}

std::pair<double, double> full_range_vs_shell_sum(double Lambda, double dk,
                                                  double q) {
  if (!(Lambda > 0.0) || !(dk > 0.0))
    throw std::invalid_argument("requires Lambda > 0 and dk > 0");
  const auto n_blocks = static_cast<long long>(std::llround(Lambda / dk));
  if (n_blocks < 1 || std::abs(n_blocks * dk - Lambda) > 1e-9 * Lambda)
    throw std::invalid_argument("dk must divide Lambda (within rounding)");

  // The sum constraint p + p' = q is even in q: branches +-q mirror.
  const double s = std::abs(q);
  const Interval full{0.0, Lambda};
  const double i_full = constrained(full, full, s).length();

  double i_blocks = 0.0;
  for (long long j = 0; j < n_blocks; ++j) {
    const Interval block{j * dk, j + 1 == n_blocks ? Lambda : (j + 1) * dk};
    i_blocks += constrained(block, block, s).length();
  }
  return {i_full, i_blocks};
}

}  // namespace zeff
