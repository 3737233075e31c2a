#pragma once

#include <cstdint>
#include <vector>

#include "zeff/field_grid.hpp"
#include "zeff/model.hpp"

namespace zeff {

enum class QuadratureScheme { Ptrg, Erg };
enum class FlowEquation { Ptrg, ErgContinuum };
enum class FlowMode { FrozenOneLoop, RunningZFrozenV };
enum class ModeFrequency { FourierPeriodic, LatticeSine };

/// Proper-time RG flow right-hand side, k * dZ_k/dk, evaluated from local
/// derivative data.  Scales linearly with hbar.
///
///   (k^2/4pi)^{1/2} e^{-V''/(Z k^2)}
///     * ( -Z''/(Z k^2) + 21 (Z')^2 / (24 Z^2 k^2)
///         + 9 Z' V''' / (6 (Z k^2)^2) - Z (V''')^2 / (6 (Z k^2)^3) )
///
/// Requires k > 0 and Z > 0.  For V'' < 0 the exponential diverges as
/// k -> 0; an overflow guard turns that into a DomainError.
double ptrg_rhs(const DerivativeBundle& z_bundle,
                const DerivativeBundle& v_bundle, double k, double hbar);

/// Exact-RG flow right-hand side (hbar/2pi) z'' / (z k^2 + v'').
/// Requires k >= 0 and a positive denominator.
double erg_rhs(double z_value, double z_second, double v_second, double k,
               double hbar);

/// One-loop correction Delta Z at phi0 by adaptive quadrature over
/// k in (0, infinity), couplings frozen at their bare values.  Orientation:
/// the bare data sit at the UV end and the effective value is read at k = 0,
/// so
///   Delta Z_ERG  = + int_0^inf dk erg_rhs(k)
///   Delta Z_PTRG = - int_0^inf dk ptrg_rhs(k) / k
/// Relative tolerance 1e-9; the tail beyond k* = max(1, 10 sqrt(V''/Z)) is
/// integrated in the substituted variable u = 1/k.
double oneloop_correction_by_quadrature(const ScalarFieldModel& model,
                                        double phi0, QuadratureScheme scheme);

struct FlowConfig {
  double k_uv = 1e4;
  double k_ir = 0.0;
  FlowMode mode = FlowMode::FrozenOneLoop;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  std::int64_t max_steps = 1'000'000;
  /// Cutoff values at which intermediate states are recorded, in addition to
  /// the initial and terminal states.
  std::vector<double> snapshots;

  void validate() const;
  bool operator==(const FlowConfig&) const = default;
};

/// Running kinetic coefficient sampled on a field grid at one cutoff value.
struct FlowState {
  double k = 0.0;
  std::vector<double> z;
};

struct FlowTrajectory {
  FieldGrid grid;
  std::vector<FlowState> states;  // initial, requested snapshots, terminal
  std::int64_t steps = 0;

  const FlowState& initial() const { return states.front(); }
  const FlowState& terminal() const { return states.back(); }
};

/// Integrates the selected flow from k_uv down to k_ir on the grid with an
/// adaptive embedded Runge-Kutta stepper.  V is frozen at its bare values
/// throughout; in RunningZFrozenV mode the Z-derivatives entering the
/// right-hand side are recomputed from the evolving grid each evaluation.
/// Aborts with DomainError (reporting k and phi) if any Z drops to <= 0.
FlowTrajectory integrate_flow(const ScalarFieldModel& model,
                              const FieldGrid& grid, const FlowConfig& cfg,
                              FlowEquation which);

struct DiscreteErgConfig {
  std::int64_t n_modes = 0;        // N >= 4
  double epsilon = 0.0;            // lattice time spacing
  bool include_constant_term = false;
  ModeFrequency mode_frequency = ModeFrequency::FourierPeriodic;

  void validate() const;
  /// beta = (N+1) epsilon / hbar, the inverse temperature.
  double beta(double hbar) const;
  double omega(std::int64_t n) const;
  bool operator==(const DiscreteErgConfig&) const = default;
};

/// Mode-by-mode elimination: starting from the bare Z_N = Z(phi0), iterates
///
///   Z_{n-1} = Z_n + 1/(2 beta) * ( [constant term] + 2 Z''/(Z w_n^2 + V'') )
///
/// for n = N..1 with Z, Z'' and V'' frozen at bare values and multiplicity 2
/// per positive mode.  Returns the sequence indexed by n (result[n] = Z_n,
/// so result[N] is bare and result[0] carries the accumulated correction).
std::vector<double> erg_discrete_sweep(const ScalarFieldModel& model,
                                       double phi0,
                                       const DiscreteErgConfig& cfg);

}  // namespace zeff
