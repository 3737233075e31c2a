#include "zeff/field_grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zeff {

FieldGrid::FieldGrid(double phi_min, double phi_max, int n)
    : phi_min_(phi_min), phi_max_(phi_max), n_(n) {
  if (!std::isfinite(phi_min) || !std::isfinite(phi_max))
    throw std::invalid_argument("grid bounds must be finite");
  if (!(phi_min < phi_max))
    throw std::invalid_argument("grid requires phi_min < phi_max");
  if (n < 3) throw std::invalid_argument("grid requires n >= 3");
  spacing_ = (phi_max - phi_min) / (n - 1);
}

std::vector<double> FieldGrid::points() const {
  std::vector<double> p(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) p[i] = phi_min_ + spacing_ * i;
  p.back() = phi_max_;  // pin the endpoint against accumulated rounding
  return p;
}

namespace {
void check_length(std::size_t got, int expected) {
  if (got != static_cast<std::size_t>(expected))
    throw std::invalid_argument("value list has length " + std::to_string(got) +
                                ", grid has " + std::to_string(expected) +
                                " points");
}
}  // namespace

std::vector<double> second_derivative_on_grid(std::span<const double> v,
                                              const FieldGrid& grid) {
  const int n = grid.n();
  check_length(v.size(), n);
  const double h2 = grid.spacing() * grid.spacing();
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 1; i + 1 < n; ++i) d[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / h2;
  if (n >= 4) {
    d[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    d[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
  } else {
    // n == 3: the three-point stencil is all we have; still exact for quadratics
    d[0] = d[1];
    d[2] = d[1];
  }
  return d;
}

std::vector<double> first_derivative_on_grid(std::span<const double> v,
                                             const FieldGrid& grid) {
  const int n = grid.n();
  check_length(v.size(), n);
  const double h = grid.spacing();
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return d;
}

}  // namespace zeff
