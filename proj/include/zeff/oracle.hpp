#pragma once

#include <vector>

#include "zeff/model.hpp"

namespace zeff {

/// Probe protocol for the lattice determinant oracle: sinusoidal paths
/// phi0 + eps sin(Omega t) with Omega = 2 pi mode / period (commensurate by
/// construction).  Per lattice level, Gamma_1/eps^2 is extrapolated to
/// eps -> 0 and fit as A + B Omega^2 across the probe frequencies; the
/// slope B is then extrapolated to zero spacing.  Fitting before the
/// continuum extrapolation keeps the frequency-independent measure piece of
/// the flat log-determinant out of B (it lands in the intercept, which is
/// reported as a lattice-scheme diagnostic only).
struct OracleConfig {
  std::vector<double> epsilons;  // probe amplitudes, > 0
  std::vector<int> modes;        // integer mode numbers m >= 1, need >= 3
  double period = 0.0;           // T
  int slices = 0;                // base M, >= 8
  int richardson_levels_a = 2;   // uses M, 2M, ..., M 2^{levels-1}
  int richardson_levels_eps = 0; // 0 = use the whole epsilon list

  void validate() const;
  bool operator==(const OracleConfig&) const = default;
};

struct OracleResult {
  double slope = 0.0;         // B: the extracted Delta Z(phi0)
  double slope_stderr = 0.0;  // max(fit stderr, last continuum correction)
  double intercept = 0.0;     // A at the finest lattice (diagnostic only)
  double intercept_stderr = 0.0;
  std::vector<double> omegas;
  std::vector<double> c2;         // eps-extrapolated Gamma_1/eps^2, finest level
  std::vector<double> c2_err;     // size of the last eps-extrapolation step
  std::vector<double> residuals;  // finest-level y_i - (A + B omega_i^2)
  /// eps-extrapolated c2 at each lattice refinement level,
  /// convergence[omega_index][level].
  std::vector<std::vector<double>> convergence;
};

/// Fits (4/T) Gamma_1 / eps^2 = A + B Omega^2 over the configured probe
/// frequencies and reports B as the one-loop correction Delta Z(phi0).
OracleResult extract_wavefunction_correction(const ScalarFieldModel& model,
                                             double phi0,
                                             const OracleConfig& cfg);

}  // namespace zeff
