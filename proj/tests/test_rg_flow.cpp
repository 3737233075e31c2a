#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zeff/closed_form.hpp"
#include "zeff/errors.hpp"
#include "zeff/rg_flow.hpp"

using namespace zeff;

namespace {

ScalarFieldModel comparison_model(double hbar = 1.0) {
  return {FunctionSpec::polynomial({1.0, 0.0, 1.0}),
          FunctionSpec::named("harmonic"), hbar};
}

// Z = 1 + phi + phi^2, V = phi^2/2 + phi^3/6: all four structures active.
ScalarFieldModel rich_model(double hbar = 1.0) {
  return {FunctionSpec::polynomial({1.0, 1.0, 1.0}),
          FunctionSpec::polynomial({0.0, 0.0, 0.5, 1.0 / 6.0}), hbar};
}

DerivativeBundle bundle(double f0, double f1, double f2, double f3) {
  return {f0, f1, f2, f3};
}

}  // namespace

TEST_CASE("ptrg_rhs basics") {
  SUBCASE("constant Z with V'''=0 vanishes for all k") {
    auto z = bundle(2.0, 0.0, 0.0, 0.0);
    auto v = bundle(0.0, 0.0, 1.0, 0.0);
    for (double k : {0.1, 1.0, 10.0, 1e3}) CHECK(ptrg_rhs(z, v, k, 1.0) == 0.0);
  }
  SUBCASE("worked value at the comparison model, phi=0, k=1") {
    auto z = bundle(1.0, 0.0, 2.0, 0.0);
    auto v = bundle(0.0, 0.0, 1.0, 0.0);
    // (1/(2 sqrt(pi))) e^{-1} (-2)
    CHECK(ptrg_rhs(z, v, 1.0, 1.0) ==
          doctest::Approx(-0.20755374871029735).epsilon(1e-14));
    const double independent =
        -std::exp(-1.0) / std::sqrt(std::numbers::pi);
    CHECK(ptrg_rhs(z, v, 1.0, 1.0) ==
          doctest::Approx(independent).epsilon(1e-15));
  }
  SUBCASE("scale invariance under (Z,V) -> (lambda Z, lambda V)") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    auto z = bundle(1.3, 0.4, 0.8, 0.0);
    auto v = bundle(0.0, 0.2, 0.9, 0.5);
    const double base = ptrg_rhs(z, v, 0.7, 1.0);
    for (int i = 0; i < 20; ++i) {
      const double lam = u(rng);
      auto zs = bundle(lam * 1.3, lam * 0.4, lam * 0.8, 0.0);
      auto vs = bundle(0.0, lam * 0.2, lam * 0.9, lam * 0.5);
      CHECK(ptrg_rhs(zs, vs, 0.7, 1.0) == doctest::Approx(base).epsilon(1e-13));
    }
  }
  SUBCASE("domain and overflow guards") {
    auto z = bundle(1.0, 0.0, 2.0, 0.0);
    auto v = bundle(0.0, 0.0, 1.0, 0.0);
    CHECK_THROWS_AS(ptrg_rhs(z, v, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(ptrg_rhs(z, v, -1.0, 1.0), DomainError);
    auto zbad = bundle(-1.0, 0.0, 2.0, 0.0);
    CHECK_THROWS_AS(ptrg_rhs(zbad, v, 1.0, 1.0), DomainError);
    // V'' < 0 makes the exponential blow up as k -> 0
    auto vneg = bundle(0.0, 0.0, -1.0, 0.0);
    CHECK_THROWS_AS(ptrg_rhs(z, vneg, 1e-3, 1.0), DomainError);
  }
}

TEST_CASE("erg_rhs basics") {
  CHECK(erg_rhs(1.0, 0.0, 1.0, 2.0, 1.0) == 0.0);
  CHECK(erg_rhs(1.0, 2.0, 1.0, 0.0, 1.0) ==
        doctest::Approx(0.31830988618379067).epsilon(1e-15));
  CHECK(erg_rhs(1.0, 2.0, 1.0, 0.0, 1.0) ==
        doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-15));
  CHECK_THROWS_AS(erg_rhs(1.0, 2.0, -1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(erg_rhs(1.0, 2.0, 0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(erg_rhs(1.0, 2.0, 1.0, -0.5, 1.0), DomainError);
}

TEST_CASE("one-loop quadratures at the comparison point") {
  auto m = comparison_model();
  // analytic: (1/2pi) * 2 * int_0^inf dk/(k^2+1) = 1/2
  CHECK(oneloop_correction_by_quadrature(m, 0.0, QuadratureScheme::Erg) ==
        doctest::Approx(0.5).epsilon(1e-9));
  // Gaussian moment route gives the same 1/2 for the proper-time flow
  CHECK(oneloop_correction_by_quadrature(m, 0.0, QuadratureScheme::Ptrg) ==
        doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("quadratures vanish for constant Z with V''' = 0") {
  ScalarFieldModel m(FunctionSpec::polynomial({3.0}),
                     FunctionSpec::named("harmonic", {{"m2", 2.0}}));
  CHECK(oneloop_correction_by_quadrature(m, 0.4, QuadratureScheme::Erg) == 0.0);
  CHECK(oneloop_correction_by_quadrature(m, 0.4, QuadratureScheme::Ptrg) == 0.0);
}

TEST_CASE("ptrg quadrature reproduces the full closed-form correction") {
  auto m = rich_model();
  for (double phi : {0.0, 0.3, 1.0}) {
    auto s = z_eff_derivative_expansion(m, phi);
    const double dz =
        oneloop_correction_by_quadrature(m, phi, QuadratureScheme::Ptrg);
    CHECK(dz == doctest::Approx(s.t1 + s.t2 + s.t3 + s.t4).epsilon(1e-7));
  }
}

TEST_CASE("erg quadrature equals the shared t4 term alone") {
  auto m = rich_model();
  for (double phi : {0.0, 0.3, 1.0}) {
    auto s = z_eff_derivative_expansion(m, phi);
    const double dz =
        oneloop_correction_by_quadrature(m, phi, QuadratureScheme::Erg);
    CHECK(dz == doctest::Approx(s.t4).epsilon(1e-9));
    CHECK(std::abs(dz - (s.t1 + s.t2 + s.t3 + s.t4)) > 1e-3);  // not the sum
  }
}

TEST_CASE("quadrature corrections are scale invariant and hbar linear") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  const double phi = 0.3;
  auto base_p = oneloop_correction_by_quadrature(rich_model(), phi,
                                                 QuadratureScheme::Ptrg);
  auto base_e = oneloop_correction_by_quadrature(rich_model(), phi,
                                                 QuadratureScheme::Erg);
  for (int i = 0; i < 5; ++i) {
    const double lam = u(rng);
    ScalarFieldModel scaled(
        FunctionSpec::polynomial({lam, lam, lam}),
        FunctionSpec::polynomial({0.0, 0.0, 0.5 * lam, lam / 6.0}));
    CHECK(oneloop_correction_by_quadrature(scaled, phi, QuadratureScheme::Ptrg) ==
          doctest::Approx(base_p).epsilon(1e-8));
    CHECK(oneloop_correction_by_quadrature(scaled, phi, QuadratureScheme::Erg) ==
          doctest::Approx(base_e).epsilon(1e-9));
  }
  auto scaled_hbar = rich_model(2.5);
  CHECK(oneloop_correction_by_quadrature(scaled_hbar, phi,
                                         QuadratureScheme::Ptrg) ==
        doctest::Approx(2.5 * base_p).epsilon(1e-9));
}

TEST_CASE("frozen flow terminal matches the quadrature") {
  auto m = comparison_model();
  FieldGrid grid(-0.5, 0.5, 3);
  FlowConfig cfg;
  cfg.k_uv = 1e6;
  cfg.k_ir = 1e-6;
  cfg.rel_tol = 1e-6;
  cfg.abs_tol = 1e-12;
  cfg.mode = FlowMode::FrozenOneLoop;

  for (auto which : {FlowEquation::ErgContinuum, FlowEquation::Ptrg}) {
    auto traj = integrate_flow(m, grid, cfg, which);
    const auto phis = grid.points();
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const double dz_flow = traj.terminal().z[i] - traj.initial().z[i];
      const double dz_quad = oneloop_correction_by_quadrature(
          m, phis[i],
          which == FlowEquation::Ptrg ? QuadratureScheme::Ptrg
                                      : QuadratureScheme::Erg);
      CHECK(dz_flow ==
            doctest::Approx(dz_quad).epsilon(10.0 * cfg.rel_tol));
    }
  }
}

TEST_CASE("flat model flows nowhere") {
  ScalarFieldModel m(FunctionSpec::polynomial({1.0}),
                     FunctionSpec::named("harmonic"));
  FieldGrid grid(-1.0, 1.0, 5);
  FlowConfig cfg;
  cfg.k_uv = 10.0;
  cfg.k_ir = 0.0;
  auto traj = integrate_flow(m, grid, cfg, FlowEquation::ErgContinuum);
  for (std::size_t i = 0; i < traj.terminal().z.size(); ++i)
    CHECK(traj.terminal().z[i] == traj.initial().z[i]);
}

TEST_CASE("halving the tolerance moves the terminal value within budget") {
  auto m = comparison_model();
  FieldGrid grid(-0.2, 0.2, 3);
  FlowConfig loose;
  loose.k_uv = 1e4;
  loose.k_ir = 1e-4;
  loose.rel_tol = 1e-5;
  FlowConfig tight = loose;
  tight.rel_tol = 5e-6;

  auto loose_traj = integrate_flow(m, grid, loose, FlowEquation::ErgContinuum);
  auto tight_traj = integrate_flow(m, grid, tight, FlowEquation::ErgContinuum);
  const double zl = loose_traj.terminal().z[1];
  const double zt = tight_traj.terminal().z[1];
  // stepper contract: per-step error below rel_tol |z| + abs_tol, so the
  // looser run's accumulated error budget bounds the shift
  const double budget =
      loose_traj.steps * (loose.rel_tol * std::abs(zl) + loose.abs_tol);
  CHECK(std::abs(zt - zl) <= budget);
  CHECK(std::abs(zt - zl) > 0.0);  // the tolerance change is visible
}

TEST_CASE("flow snapshots are recorded at requested cutoffs") {
  auto m = comparison_model();
  FieldGrid grid(-0.2, 0.2, 3);
  FlowConfig cfg;
  cfg.k_uv = 100.0;
  cfg.k_ir = 0.01;
  cfg.snapshots = {10.0, 1.0, 0.1};
  auto traj = integrate_flow(m, grid, cfg, FlowEquation::ErgContinuum);
  REQUIRE(traj.states.size() == 5);  // initial + 3 + terminal
  CHECK(traj.states[0].k == 100.0);
  CHECK(traj.states[1].k == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(traj.states[2].k == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(traj.states[3].k == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(traj.states[4].k == 0.01);
  // Z grows monotonically towards the IR for this model
  CHECK(traj.states[1].z[1] > traj.states[0].z[1]);
  CHECK(traj.states[4].z[1] > traj.states[3].z[1]);
}

TEST_CASE("running-z mode stays close to frozen mode at small hbar") {
  const double hbar = 1e-3;
  auto m = comparison_model(hbar);
  FieldGrid grid(-1.0, 1.0, 41);
  FlowConfig cfg;
  cfg.k_uv = 1e4;
  cfg.k_ir = 1e-3;
  cfg.rel_tol = 1e-8;
  cfg.abs_tol = 1e-14;

  cfg.mode = FlowMode::FrozenOneLoop;
  auto frozen = integrate_flow(m, grid, cfg, FlowEquation::ErgContinuum);
  cfg.mode = FlowMode::RunningZFrozenV;
  auto running = integrate_flow(m, grid, cfg, FlowEquation::ErgContinuum);

  const int mid = grid.n() / 2;
  const double dz_frozen = frozen.terminal().z[mid] - frozen.initial().z[mid];
  const double dz_running = running.terminal().z[mid] - running.initial().z[mid];
  CHECK(dz_frozen != 0.0);
  // difference is one order higher in hbar
  CHECK(std::abs(dz_running - dz_frozen) < 0.05 * std::abs(dz_frozen));
}

TEST_CASE("flow error paths") {
  auto m = comparison_model();
  FieldGrid grid(-0.2, 0.2, 3);
  SUBCASE("max_steps exceeded") {
    FlowConfig cfg;
    cfg.k_uv = 1e6;
    cfg.k_ir = 1e-6;
    cfg.max_steps = 3;
    CHECK_THROWS_AS(integrate_flow(m, grid, cfg, FlowEquation::ErgContinuum),
                    ConvergenceError);
  }
  SUBCASE("invalid config") {
    FlowConfig cfg;
    cfg.k_uv = 1.0;
    cfg.k_ir = 2.0;
    CHECK_THROWS_AS(integrate_flow(m, grid, cfg, FlowEquation::ErgContinuum),
                    std::invalid_argument);
    FlowConfig cfg2;
    cfg2.rel_tol = 0.5;  // above the allowed ceiling
    CHECK_THROWS_AS(integrate_flow(m, grid, cfg2, FlowEquation::ErgContinuum),
                    std::invalid_argument);
  }
  SUBCASE("Z <= 0 on the initial grid") {
    ScalarFieldModel bad(FunctionSpec::polynomial({0.1, 0.0, -1.0}),
                         FunctionSpec::named("harmonic"));
    FlowConfig cfg;
    CHECK_THROWS_AS(integrate_flow(bad, FieldGrid(-1.0, 1.0, 5), cfg,
                                   FlowEquation::ErgContinuum),
                    DomainError);
  }
}

TEST_CASE("discrete sweep basics") {
  auto m = comparison_model();
  SUBCASE("flat Z never moves") {
    ScalarFieldModel flat(FunctionSpec::polynomial({2.0}),
                          FunctionSpec::named("harmonic"));
    DiscreteErgConfig cfg;
    cfg.n_modes = 100;
    cfg.epsilon = 0.01;
    auto seq = erg_discrete_sweep(flat, 0.0, cfg);
    REQUIRE(seq.size() == 101);
    for (double z : seq) CHECK(z == 2.0);
  }
  SUBCASE("constant term adds exactly N/(2 beta)") {
    DiscreteErgConfig cfg;
    cfg.n_modes = 1000;
    cfg.epsilon = 0.01;
    auto without = erg_discrete_sweep(m, 0.0, cfg);
    cfg.include_constant_term = true;
    auto with = erg_discrete_sweep(m, 0.0, cfg);
    const double beta = cfg.beta(m.hbar());
    CHECK(with.front() - without.front() ==
          doctest::Approx(cfg.n_modes / (2.0 * beta)).epsilon(1e-12));
  }
  SUBCASE("denominator guard") {
    ScalarFieldModel unstable(FunctionSpec::polynomial({1.0, 0.0, 1.0}),
                              FunctionSpec::polynomial({0.0, 0.0, -0.5}));
    DiscreteErgConfig cfg;
    cfg.n_modes = 1000;
    cfg.epsilon = 1.0;  // low omega_1 so Z w^2 + V'' < 0 at small modes
    CHECK_THROWS_AS(erg_discrete_sweep(unstable, 0.0, cfg), DomainError);
  }
  SUBCASE("config validation") {
    DiscreteErgConfig cfg;
    cfg.n_modes = 3;
    cfg.epsilon = 0.1;
    CHECK_THROWS_AS(erg_discrete_sweep(m, 0.0, cfg), std::invalid_argument);
  }
}

TEST_CASE("discrete sweep converges to the continuum quadrature") {
  auto m = comparison_model();
  const double target =
      oneloop_correction_by_quadrature(m, 0.0, QuadratureScheme::Erg);
  DiscreteErgConfig cfg;
  cfg.n_modes = 1'000'000;
  cfg.epsilon = 1e-3;
  auto seq = erg_discrete_sweep(m, 0.0, cfg);
  const double accumulated = seq.front() - seq.back();
  CHECK(accumulated == doctest::Approx(target).epsilon(0.01));
}

TEST_CASE("discrete sweep scale invariance and hbar linearity") {
  DiscreteErgConfig cfg;
  cfg.n_modes = 10000;
  cfg.epsilon = 5e-3;
  auto dz = [&](const ScalarFieldModel& m) {
    auto seq = erg_discrete_sweep(m, 0.0, cfg);
    return seq.front() - seq.back();
  };
  const double base = dz(comparison_model());
  ScalarFieldModel scaled(FunctionSpec::polynomial({3.0, 0.0, 3.0}),
                          FunctionSpec::named("harmonic", {{"m2", 3.0}}));
  CHECK(dz(scaled) == doctest::Approx(base).epsilon(1e-12));
  CHECK(dz(comparison_model(2.0)) == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("lattice-sine frequency convention") {
  auto m = comparison_model();
  DiscreteErgConfig cfg;
  cfg.n_modes = 200'000;
  cfg.epsilon = 2e-3;
  cfg.mode_frequency = ModeFrequency::LatticeSine;
  auto seq = erg_discrete_sweep(m, 0.0, cfg);
  const double accumulated = seq.front() - seq.back();
  // Aliasing doubles the sine-dispersion sum relative to the continuum
  // quadrature value of 1/2: modes n and N+1-n share one physical frequency.
  CHECK(accumulated == doctest::Approx(1.0).epsilon(0.02));
}
