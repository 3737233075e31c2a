#include "zeff/rg_flow.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "zeff/errors.hpp"
#include "zeff/quadrature.hpp"

namespace zeff {

namespace {

constexpr double kExpUnderflow = -745.0;  // exp() underflows to 0 below this
constexpr double kExpOverflow = 709.0;    // exp() overflows above this
constexpr double kQuadRelTol = 1e-9;

const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

// Bracket of the proper-time flow in the variable x = 1/(Z k^2):
//   -Z'' x + (21/24)(Z')^2 x / Z + (9/6) Z' V''' x^2 - (Z/6)(V''')^2 x^3
double ptrg_bracket(const DerivativeBundle& z, const DerivativeBundle& v,
                    double x) {
  return -z.f2 * x + (21.0 / 24.0) * z.f1 * z.f1 * x / z.f0 +
         (9.0 / 6.0) * z.f1 * v.f3 * x * x -
         (z.f0 / 6.0) * v.f3 * v.f3 * x * x * x;
}

}  // namespace

double ptrg_rhs(const DerivativeBundle& z, const DerivativeBundle& v, double k,
                double hbar) {
  if (!(k > 0.0)) throw DomainError("ptrg_rhs requires k > 0");
  if (!(z.f0 > 0.0)) throw DomainError("ptrg_rhs requires Z > 0");
  const double x = 1.0 / (z.f0 * k * k);
  const double exponent = -v.f2 * x;
  if (exponent > kExpOverflow)
    throw DomainError(
        "ptrg_rhs overflow: exp(-V''/(Z k^2)) diverges (V'' < 0, k -> 0)");
  if (exponent < kExpUnderflow) return 0.0;
  // (k^2/4pi)^{1/2} = k / (2 sqrt(pi)) for k > 0
  return hbar * 0.5 * k * kInvSqrtPi * std::exp(exponent) *
         ptrg_bracket(z, v, x);
}

double erg_rhs(double z_value, double z_second, double v_second, double k,
               double hbar) {
  if (!(k >= 0.0)) throw DomainError("erg_rhs requires k >= 0");
  const double denom = z_value * k * k + v_second;
  if (!(denom > 0.0))
    throw DomainError("erg_rhs denominator Z k^2 + V'' = " +
                      std::to_string(denom) + " <= 0");
  return hbar / (2.0 * std::numbers::pi) * z_second / denom;
}

double oneloop_correction_by_quadrature(const ScalarFieldModel& model,
                                        double phi0, QuadratureScheme scheme) {
  const DerivativeBundle z = model.z_bundle(phi0);
  const DerivativeBundle v = model.v_bundle(phi0);
  if (!(z.f0 > 0.0)) throw DomainError("Z(phi0) <= 0", phi0);
  if (!(v.f2 > 0.0)) throw DomainError("V''(phi0) <= 0", phi0);
  const double hbar = model.hbar();
  const double k_star = std::max(1.0, 10.0 * std::sqrt(v.f2 / z.f0));

  if (scheme == QuadratureScheme::Erg) {
    auto head = [&](double k) { return erg_rhs(z.f0, z.f2, v.f2, k, hbar); };
    // u = 1/k: integrand dk -> (hbar/2pi) z'' / (Z + V'' u^2) du
    auto tail = [&](double u) {
      return hbar / (2.0 * std::numbers::pi) * z.f2 /
             (z.f0 + v.f2 * u * u);
    };
    return integrate(head, 0.0, k_star, kQuadRelTol) +
           integrate_tail(tail, k_star, kQuadRelTol);
  }

  // PTRG: Delta Z = - int_0^inf dk ptrg_rhs(k)/k
  auto head = [&](double k) { return -ptrg_rhs(z, v, k, hbar) / k; };
  // u = 1/k substitution done analytically: with x = u^2/Z,
  //   -rhs(1/u)/u'^2 = -(hbar/(2 sqrt(pi))) e^{-V'' u^2/Z} * bracket(x)/u^2
  // and bracket(x)/u^2 is polynomial in u^2.
  auto tail = [&](double u) {
    const double u2 = u * u;
    const double exponent = -v.f2 * u2 / z.f0;
    if (exponent < kExpUnderflow) return 0.0;
    const double poly = -z.f2 / z.f0 +
                        (21.0 / 24.0) * z.f1 * z.f1 / (z.f0 * z.f0) +
                        (9.0 / 6.0) * z.f1 * v.f3 * u2 / (z.f0 * z.f0) -
                        v.f3 * v.f3 * u2 * u2 / (6.0 * z.f0 * z.f0);
    return -hbar * 0.5 * kInvSqrtPi * std::exp(exponent) * poly;
  };
  return integrate(head, 0.0, k_star, kQuadRelTol) +
         integrate_tail(tail, k_star, kQuadRelTol);
}

void FlowConfig::validate() const {
  if (!(k_uv > 0.0) || !std::isfinite(k_uv))
    throw std::invalid_argument("flow requires k_uv > 0");
  if (!(k_ir >= 0.0) || !(k_ir < k_uv))
    throw std::invalid_argument("flow requires 0 <= k_ir < k_uv");
  for (double t : {rel_tol, abs_tol})
    if (!(t > 0.0) || !(t <= 1e-2))
      throw std::invalid_argument("flow tolerances must lie in (0, 1e-2]");
  if (max_steps < 1) throw std::invalid_argument("flow requires max_steps >= 1");
  for (double s : snapshots)
    if (!std::isfinite(s))
      throw std::invalid_argument("snapshot cutoffs must be finite");
}

namespace {

using State = std::vector<double>;

struct FlowSystem {
  const ScalarFieldModel* model;
  const FieldGrid* grid;
  std::vector<double> phis;
  std::vector<DerivativeBundle> z_bare;
  std::vector<DerivativeBundle> v_bare;
  FlowEquation which;
  FlowMode mode;
  double k_uv;

  // dZ/dtau with tau = k_uv - k, oriented so the bare data sit at the UV end
  // and the correction accumulates while flowing down to the IR.
  void operator()(const State& z, State& dzdtau, double tau) const {
    const double k = std::max(k_uv - tau, 0.0);
    const double hbar = model->hbar();
    const std::size_t n = z.size();
    dzdtau.resize(n);
    if (mode == FlowMode::FrozenOneLoop) {
      for (std::size_t i = 0; i < n; ++i) {
        if (which == FlowEquation::ErgContinuum) {
          dzdtau[i] = erg_rhs(z_bare[i].f0, z_bare[i].f2, v_bare[i].f2, k, hbar);
        } else {
          dzdtau[i] = k > 0.0 ? -ptrg_rhs(z_bare[i], v_bare[i], k, hbar) / k
                              : 0.0;
        }
      }
      return;
    }
    // RunningZFrozenV: Z-derivatives recomputed from the evolving grid.
    for (std::size_t i = 0; i < n; ++i)
      if (!(z[i] > 0.0))
        throw DomainError("running Z reached " + std::to_string(z[i]) +
                              " <= 0 at k = " + std::to_string(k) +
                              ", phi = " + std::to_string(phis[i]),
                          phis[i]);
    const std::vector<double> z2 = second_derivative_on_grid(z, *grid);
    if (which == FlowEquation::ErgContinuum) {
      for (std::size_t i = 0; i < n; ++i)
        dzdtau[i] = erg_rhs(z[i], z2[i], v_bare[i].f2, k, hbar);
    } else {
      const std::vector<double> z1 = first_derivative_on_grid(z, *grid);
      for (std::size_t i = 0; i < n; ++i) {
        DerivativeBundle zb{z[i], z1[i], z2[i], 0.0};
        dzdtau[i] = k > 0.0 ? -ptrg_rhs(zb, v_bare[i], k, hbar) / k : 0.0;
      }
    }
  }
};

}  // namespace

FlowTrajectory integrate_flow(const ScalarFieldModel& model,
                              const FieldGrid& grid, const FlowConfig& cfg,
                              FlowEquation which) {
  namespace odeint = boost::numeric::odeint;
  cfg.validate();

  FlowSystem sys;
  sys.model = &model;
  sys.grid = &grid;
  sys.phis = grid.points();
  sys.which = which;
  sys.mode = cfg.mode;
  sys.k_uv = cfg.k_uv;
  for (double phi : sys.phis) {
    sys.z_bare.push_back(model.z_bundle(phi));
    sys.v_bare.push_back(model.v_bundle(phi));
    if (!(sys.z_bare.back().f0 > 0.0))
      throw DomainError("Z(phi) <= 0 at phi = " + std::to_string(phi), phi);
  }

  State z(sys.phis.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = sys.z_bare[i].f0;

  FlowTrajectory traj{grid, {}, 0};
  traj.states.push_back({cfg.k_uv, z});

  // Snapshot cutoffs mapped to tau targets, hit exactly by clamping the step.
  const double tau_end = cfg.k_uv - cfg.k_ir;
  std::vector<double> targets;
  for (double ks : cfg.snapshots)
    if (ks < cfg.k_uv && ks > cfg.k_ir) targets.push_back(cfg.k_uv - ks);
  std::sort(targets.begin(), targets.end());
  targets.push_back(tau_end);

  auto stepper = odeint::make_controlled(
      cfg.abs_tol, cfg.rel_tol, odeint::runge_kutta_cash_karp54<State>());

  double tau = 0.0;
  double dt = tau_end / 1000.0;
  std::size_t next_target = 0;
  const double tau_eps = 1e-14 * std::max(1.0, tau_end);

  while (next_target < targets.size()) {
    const double target = targets[next_target];
    if (tau >= target - tau_eps) {
      traj.states.push_back({cfg.k_uv - std::min(target, tau_end), z});
      ++next_target;
      continue;
    }
    if (traj.steps >= cfg.max_steps)
      throw ConvergenceError("flow exceeded max_steps = " +
                             std::to_string(cfg.max_steps));
    dt = std::min(dt, target - tau);
    if (dt < tau_eps)
      throw ConvergenceError("flow step size underflow at k = " +
                             std::to_string(cfg.k_uv - tau));
    ++traj.steps;
    const auto result = stepper.try_step(sys, z, tau, dt);
    if (result == odeint::fail) continue;  // dt shrunk, retry
    for (std::size_t i = 0; i < z.size(); ++i)
      if (!(z[i] > 0.0))
        throw DomainError("flow aborted: Z <= 0 at k = " +
                              std::to_string(cfg.k_uv - tau) +
                              ", phi = " + std::to_string(sys.phis[i]),
                          sys.phis[i]);
  }
  // terminal snapshot carries k_ir exactly
  traj.states.back().k = cfg.k_ir;
  return traj;
}

void DiscreteErgConfig::validate() const {
  if (n_modes < 4) throw std::invalid_argument("discrete sweep requires N >= 4");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("discrete sweep requires epsilon > 0");
}

double DiscreteErgConfig::beta(double hbar) const {
  return static_cast<double>(n_modes + 1) * epsilon / hbar;
}

double DiscreteErgConfig::omega(std::int64_t n) const {
  const double L = static_cast<double>(n_modes + 1);
  if (mode_frequency == ModeFrequency::FourierPeriodic)
    return 2.0 * std::numbers::pi * static_cast<double>(n) / (L * epsilon);
  return 2.0 / epsilon * std::sin(std::numbers::pi * static_cast<double>(n) / L);
}

std::vector<double> erg_discrete_sweep(const ScalarFieldModel& model,
                                       double phi0,
                                       const DiscreteErgConfig& cfg) {
  cfg.validate();
  const DerivativeBundle z = model.z_bundle(phi0);
  const DerivativeBundle v = model.v_bundle(phi0);
  if (!(z.f0 > 0.0)) throw DomainError("Z(phi0) <= 0", phi0);

  const double half_inv_beta = 0.5 / cfg.beta(model.hbar());
  const double constant = cfg.include_constant_term ? 1.0 : 0.0;

  std::vector<double> sequence(static_cast<std::size_t>(cfg.n_modes) + 1);
  sequence[static_cast<std::size_t>(cfg.n_modes)] = z.f0;
  double current = z.f0;
  for (std::int64_t n = cfg.n_modes; n >= 1; --n) {
    const double w = cfg.omega(n);
    const double denom = z.f0 * w * w + v.f2;
    if (!(denom > 0.0))
      throw DomainError("discrete sweep denominator <= 0 at mode n = " +
                            std::to_string(n),
                        phi0);
    current += half_inv_beta * (constant + 2.0 * z.f2 / denom);
    sequence[static_cast<std::size_t>(n - 1)] = current;
  }
  return sequence;
}

}  // namespace zeff
