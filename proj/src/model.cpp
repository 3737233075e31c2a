#include "zeff/model.hpp"

#include <cmath>
#include <stdexcept>

namespace zeff {

ScalarFieldModel::ScalarFieldModel(FunctionSpec z, FunctionSpec v, double hbar)
    : z_(std::move(z)), v_(std::move(v)), hbar_(hbar) {
  if (!std::isfinite(hbar) || hbar <= 0.0)
    throw std::invalid_argument("hbar must be positive and finite");
}

}  // namespace zeff
