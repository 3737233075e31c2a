#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "zeff/errors.hpp"
#include "zeff/field_grid.hpp"
#include "zeff/function_spec.hpp"
#include "zeff/model.hpp"

using namespace zeff;

namespace {

// Independent oracle: symmetric finite differences of the plain value,
// scale-aware step.
double fd1(const FunctionSpec& f, double x, double h) {
  return (f.eval(x + h).f0 - f.eval(x - h).f0) / (2.0 * h);
}
double fd2(const FunctionSpec& f, double x, double h) {
  return (f.eval(x + h).f0 - 2.0 * f.eval(x).f0 + f.eval(x - h).f0) / (h * h);
}
double fd3(const FunctionSpec& f, double x, double h) {
  return (f.eval(x + 2 * h).f0 - 2.0 * f.eval(x + h).f0 +
          2.0 * f.eval(x - h).f0 - f.eval(x - 2 * h).f0) /
         (2.0 * h * h * h);
}

}  // namespace

TEST_CASE("polynomial derivative bundle: phi^2 at 3") {
  auto f = FunctionSpec::polynomial({0.0, 0.0, 1.0});
  auto b = eval_bundle(f, 3.0);
  CHECK(b.f0 == 9.0);
  CHECK(b.f1 == 6.0);
  CHECK(b.f2 == 2.0);
  CHECK(b.f3 == 0.0);
}

TEST_CASE("builtin quartic bundle at 1") {
  auto v = FunctionSpec::named("quartic", {{"m2", 1.0}, {"g", 1.0}});
  auto b = eval_bundle(v, 1.0);
  CHECK(b.f0 == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(b.f1 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(b.f2 == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(b.f3 == doctest::Approx(6.0).epsilon(1e-15));
  // confirm against finite differences
  CHECK(b.f1 == doctest::Approx(fd1(v, 1.0, 1e-4)).epsilon(1e-7));
  CHECK(b.f2 == doctest::Approx(fd2(v, 1.0, 1e-4)).epsilon(1e-6));
}

TEST_CASE("builtin registry misses and bad parameters") {
  CHECK_THROWS_WITH_AS(FunctionSpec::named("unknown"),
                       doctest::Contains("unknown builtin"),
                       std::invalid_argument);
  CHECK_THROWS_AS(
      FunctionSpec::named("harmonic",
                          {{"m2", std::numeric_limits<double>::infinity()}}),
      std::invalid_argument);
  CHECK_THROWS_AS(FunctionSpec::named("harmonic", {{"mass", 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FunctionSpec::polynomial(
                      {0.0, std::numeric_limits<double>::quiet_NaN()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FunctionSpec::polynomial(std::vector<double>(14, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("builtin z-quadratic") {
  auto z = FunctionSpec::named("z-quadratic", {{"g", 2.0}});
  auto b = eval_bundle(z, 1.5);
  CHECK(b.f0 == doctest::Approx(1.0 + 2.0 * 2.25).epsilon(1e-15));
  CHECK(b.f1 == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(b.f2 == 4.0);
}

TEST_CASE("bundle vs finite differences on random polynomials") {
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_real_distribution<double> point(-1.5, 1.5);
  for (int trial = 0; trial < 40; ++trial) {
    const int degree = 1 + trial % 8;
    std::vector<double> c(degree + 1);
    for (auto& ci : c) ci = coeff(rng);
    auto f = FunctionSpec::polynomial(c);
    const double x = point(rng);
    auto b = eval_bundle(f, x);
    const double scale = std::max(1.0, std::abs(x));
    const double h = 1e-4 * scale;
    CHECK(b.f1 == doctest::Approx(fd1(f, x, h)).epsilon(1e-6));
    CHECK(b.f2 == doctest::Approx(fd2(f, x, h)).epsilon(1e-5));
    // third differences need a wider step before roundoff dominates
    CHECK(b.f3 == doctest::Approx(fd3(f, x, 1e-3 * scale)).epsilon(1e-3));
  }
}

TEST_CASE("grid points") {
  FieldGrid g(0.0, 1.0, 3);
  auto p = g.points();
  REQUIRE(p.size() == 3);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 0.5);
  CHECK(p[2] == 1.0);

  CHECK_THROWS_AS(FieldGrid(-1.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(FieldGrid(1.0, 0.0, 5), std::invalid_argument);

  FieldGrid g5(0.0, 2.0, 5);
  CHECK(g5.spacing() == 0.5);
  CHECK(g5.points().size() == 5);
}

TEST_CASE("grid spacing uniform to ulp scale") {
  FieldGrid g(-0.7, 1.3, 37);
  auto p = g.points();
  const double h = g.spacing();
  const double tol = 8.0 * std::numeric_limits<double>::epsilon() *
                     std::max({1.0, std::abs(g.phi_min()), std::abs(g.phi_max())});
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    CHECK(std::abs((p[i + 1] - p[i]) - h) <= tol);
  CHECK(p.front() == g.phi_min());
  CHECK(p.back() == g.phi_max());
}

TEST_CASE("second derivative on grid is exact for quadratics") {
  for (int n : {3, 4, 11}) {
    FieldGrid g(-1.0, 2.0, n);
    auto p = g.points();
    std::vector<double> v(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) v[i] = p[i] * p[i];
    auto d2 = second_derivative_on_grid(v, g);
    for (double d : d2) CHECK(d == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("second derivative converges at second order") {
  auto max_interior_error = [](const FieldGrid& g) {
    auto p = g.points();
    std::vector<double> v(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) v[i] = std::sin(p[i]);
    auto d2 = second_derivative_on_grid(v, g);
    double err = 0.0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
      err = std::max(err, std::abs(d2[i] + std::sin(p[i])));
    return err;
  };
  const double coarse = max_interior_error(FieldGrid(0.0, 2.0, 21));
  const double fine = max_interior_error(FieldGrid(0.0, 2.0, 41));
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("second derivative rejects length mismatch") {
  FieldGrid g(0.0, 1.0, 5);
  std::vector<double> v(4, 0.0);
  CHECK_THROWS_AS(second_derivative_on_grid(v, g), std::invalid_argument);
}

TEST_CASE("second derivative is linear in its values") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FieldGrid g(0.0, 1.0, 9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(9), b(9), combo(9);
    const double alpha = u(rng), beta = u(rng);
    for (int i = 0; i < 9; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      combo[i] = alpha * a[i] + beta * b[i];
    }
    auto da = second_derivative_on_grid(a, g);
    auto db = second_derivative_on_grid(b, g);
    auto dc = second_derivative_on_grid(combo, g);
    for (int i = 0; i < 9; ++i)
      CHECK(dc[i] ==
            doctest::Approx(alpha * da[i] + beta * db[i]).epsilon(1e-10));
  }
}

TEST_CASE("model validates hbar") {
  auto z = FunctionSpec::polynomial({1.0});
  auto v = FunctionSpec::named("harmonic");
  CHECK_THROWS_AS(ScalarFieldModel(z, v, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(ScalarFieldModel(z, v, 0.0), std::invalid_argument);
  ScalarFieldModel m(z, v);
  CHECK(m.hbar() == 1.0);
}
