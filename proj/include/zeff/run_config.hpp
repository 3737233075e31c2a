#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zeff/closed_form.hpp"
#include "zeff/field_grid.hpp"
#include "zeff/model.hpp"
#include "zeff/oracle.hpp"
#include "zeff/rg_flow.hpp"

namespace zeff {

enum class RunMethod {
  DerivativeExpansion,
  ErgOneLoop,
  PtrgQuadrature,
  ErgQuadrature,
  PtrgFlow,
  ErgFlow,
  ErgDiscrete,
  Shell,
  Oracle,
};

std::string to_string(RunMethod m);
RunMethod method_from_string(const std::string& name);

/// Which subcommand is running; selects the slice of config.methods that a
/// single invocation executes.
enum class CommandFamily { ZEff, Flow, Shell, Oracle };

struct ZeffRunOptions {
  std::optional<CorrectionCoefficients> coefficients;
  bool operator==(const ZeffRunOptions&) const = default;
};

struct DiscreteRunOptions {
  double phi0 = 0.0;
  DiscreteErgConfig sweep;
  /// CSV thinning stride; 0 picks one that keeps at most ~10k rows.
  std::int64_t output_stride = 0;
  bool operator==(const DiscreteRunOptions&) const = default;
};

struct ShellRunOptions {
  double phi0 = 0.0;
  double k_c = 0.0;
  double dk = 0.0;
  std::vector<double> q_values;
  bool operator==(const ShellRunOptions&) const = default;
};

struct OracleRunOptions {
  double phi0 = 0.0;
  OracleConfig probe;
  bool operator==(const OracleRunOptions&) const = default;
};

struct RunConfig {
  RunConfig(ScalarFieldModel m, FieldGrid g)
      : model(std::move(m)), grid(g) {}

  ScalarFieldModel model;
  FieldGrid grid;
  std::vector<RunMethod> methods;
  std::string out_dir = ".";
  bool write_csv = true;
  bool write_json = true;

  ZeffRunOptions zeff;
  std::optional<FlowConfig> flow;
  std::optional<DiscreteRunOptions> discrete;
  std::optional<ShellRunOptions> shell;
  std::optional<OracleRunOptions> oracle;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a JSON run configuration.  The schema is strict:
/// unknown keys are rejected, selected methods must have their sub-configs
/// present, and basic constraints (hbar > 0, n >= 3, ...) are enforced.
/// Throws ConfigError with a line reference on syntax errors.
RunConfig parse_config(const std::string& text);

/// Canonical JSON form; parse(serialize(c).dump()) == c.
nlohmann::json serialize_config(const RunConfig& config);

/// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Shortest-round-trip decimal with 17 significant digits, locale-free;
/// the CSV cell format.
std::string csv_float(double value);

struct RunOutcome {
  int exit_code = 0;
  nlohmann::json summary;
};

/// Executes the selected methods of one family and writes their output
/// files into out_dir; summary.json is written last.  Returns exit code 0
/// when every method succeeded, 2 when a computation failed (the summary
/// names the method and, for domain errors, the offending phi0).
RunOutcome run_family(const RunConfig& config, CommandFamily family,
                      const std::filesystem::path& out_dir);

/// Merges the outputs found in out_dir into report.csv / report.json.
/// The directory's summary.json must carry the same config hash.
int write_report(const RunConfig& config,
                 const std::filesystem::path& out_dir);

}  // namespace zeff
