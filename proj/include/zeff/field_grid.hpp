#pragma once

#include <span>
#include <vector>

namespace zeff {

/// Uniform grid of background field values phi_0.
class FieldGrid {
 public:
  FieldGrid(double phi_min, double phi_max, int n);

  double phi_min() const { return phi_min_; }
  double phi_max() const { return phi_max_; }
  int n() const { return n_; }
  double spacing() const { return spacing_; }

  std::vector<double> points() const;

  bool operator==(const FieldGrid& other) const {
    return phi_min_ == other.phi_min_ && phi_max_ == other.phi_max_ &&
           n_ == other.n_;
  }

 private:
  double phi_min_;
  double phi_max_;
  int n_;
  double spacing_;
};

inline std::vector<double> grid_points(const FieldGrid& grid) {
  return grid.points();
}

/// Second derivative of sampled values: central stencil in the interior,
/// second-order one-sided stencils at the edges. Exact for quadratics.
std::vector<double> second_derivative_on_grid(std::span<const double> values,
                                              const FieldGrid& grid);

/// First derivative companion (central interior, second-order one-sided
/// edges); used by the flows that re-derive running-Z gradients on a grid.
std::vector<double> first_derivative_on_grid(std::span<const double> values,
                                             const FieldGrid& grid);

}  // namespace zeff
