#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "zeff/errors.hpp"
#include "zeff/run_config.hpp"
#include "zeff/shell_geometry.hpp"
#include "zeff/version.hpp"

namespace zeff {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kQuadratureRelTol = 1e-9;   // rg_flow quadratures
constexpr double kShellQuadRelTol = 1e-10;   // shell F(q) integrals

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

struct MethodRecorder {
  json& methods;
  int& exit_code;

  json& ok(RunMethod m) {
    json& entry = methods[to_string(m)];
    entry["status"] = "ok";
    return entry;
  }
  void failed(RunMethod m, const std::exception& e) {
    json& entry = methods[to_string(m)];
    entry["status"] = "error";
    entry["message"] = e.what();
    exit_code = 2;
  }
  void failed(RunMethod m, const DomainError& e) {
    json& entry = methods[to_string(m)];
    entry["status"] = "domain-error";
    entry["message"] = e.what();
    if (e.has_phi()) entry["phi0"] = e.phi();
    exit_code = 2;
  }
};

template <typename F>
bool guarded(MethodRecorder& rec, RunMethod m, F&& body) {
  try {
    body();
    return true;
  } catch (const DomainError& e) {
    rec.failed(m, e);
  } catch (const std::exception& e) {
    rec.failed(m, e);
  }
  return false;
}

std::vector<RunMethod> family_selection(const RunConfig& cfg,
                                        CommandFamily family) {
  static const std::map<CommandFamily, std::vector<RunMethod>> kFamilies = {
      {CommandFamily::ZEff,
       {RunMethod::DerivativeExpansion, RunMethod::ErgOneLoop,
        RunMethod::PtrgQuadrature, RunMethod::ErgQuadrature}},
      {CommandFamily::Flow,
       {RunMethod::PtrgFlow, RunMethod::ErgFlow, RunMethod::ErgDiscrete}},
      {CommandFamily::Shell, {RunMethod::Shell}},
      {CommandFamily::Oracle, {RunMethod::Oracle}},
  };
  std::vector<RunMethod> selected;
  for (RunMethod m : kFamilies.at(family))
    if (std::find(cfg.methods.begin(), cfg.methods.end(), m) !=
        cfg.methods.end())
      selected.push_back(m);
  return selected;
}

void run_zeff_family(const RunConfig& cfg,
                     const std::vector<RunMethod>& selected,
                     const fs::path& out, MethodRecorder& rec) {
  const auto phis = cfg.grid.points();
  const bool want_deriv =
      std::count(selected.begin(), selected.end(), RunMethod::DerivativeExpansion);
  const bool want_erg =
      std::count(selected.begin(), selected.end(), RunMethod::ErgOneLoop);
  const bool want_qp =
      std::count(selected.begin(), selected.end(), RunMethod::PtrgQuadrature);
  const bool want_qe =
      std::count(selected.begin(), selected.end(), RunMethod::ErgQuadrature);

  std::optional<std::vector<ZEffSample>> deriv, erg;
  std::optional<std::vector<double>> quad_ptrg, quad_erg;

  if (want_deriv)
    guarded(rec, RunMethod::DerivativeExpansion, [&] {
      std::vector<ZEffSample> rows;
      const CorrectionCoefficients coeffs =
          cfg.zeff.coefficients.value_or(CorrectionCoefficients{});
      for (double phi : phis)
        rows.push_back(z_eff_derivative_expansion(cfg.model, phi, coeffs));
      deriv = std::move(rows);
      rec.ok(RunMethod::DerivativeExpansion)["outputs"] = {"zeff.csv"};
    });
  if (want_erg)
    guarded(rec, RunMethod::ErgOneLoop, [&] {
      std::vector<ZEffSample> rows;
      for (double phi : phis) rows.push_back(z_eff_erg_oneloop(cfg.model, phi));
      erg = std::move(rows);
      rec.ok(RunMethod::ErgOneLoop)["outputs"] = {"zeff.csv"};
    });
  if (want_qp)
    guarded(rec, RunMethod::PtrgQuadrature, [&] {
      std::vector<double> dz;
      for (double phi : phis)
        dz.push_back(oneloop_correction_by_quadrature(cfg.model, phi,
                                                      QuadratureScheme::Ptrg));
      quad_ptrg = std::move(dz);
      rec.ok(RunMethod::PtrgQuadrature)["outputs"] = {"quadrature.csv"};
    });
  if (want_qe)
    guarded(rec, RunMethod::ErgQuadrature, [&] {
      std::vector<double> dz;
      for (double phi : phis)
        dz.push_back(oneloop_correction_by_quadrature(cfg.model, phi,
                                                      QuadratureScheme::Erg));
      quad_erg = std::move(dz);
      rec.ok(RunMethod::ErgQuadrature)["outputs"] = {"quadrature.csv"};
    });

  if (!cfg.write_csv) return;

  if (deriv || erg) {
    CsvWriter csv(out / "zeff.csv",
                  "phi,z_bare,t1,t2,t3,t4,z_eff_zuk,z_eff_erg,diff");
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const ZEffSample* breakdown =
          deriv ? &(*deriv)[i] : &(*erg)[i];  // erg rows carry t4 only
      std::vector<std::string> cells{
          csv_float(phis[i]),      csv_float(breakdown->z_bare),
          csv_float(breakdown->t1), csv_float(breakdown->t2),
          csv_float(breakdown->t3), csv_float(breakdown->t4)};
      cells.push_back(deriv ? csv_float((*deriv)[i].z_eff) : "");
      cells.push_back(erg ? csv_float((*erg)[i].z_eff) : "");
      cells.push_back(deriv && erg
                          ? csv_float((*deriv)[i].z_eff - (*erg)[i].z_eff)
                          : "");
      csv.row(cells);
    }
  }
  if (quad_ptrg || quad_erg) {
    CsvWriter csv(out / "quadrature.csv", "phi,delta_z_ptrg,delta_z_erg");
    for (std::size_t i = 0; i < phis.size(); ++i)
      csv.row({csv_float(phis[i]),
               quad_ptrg ? csv_float((*quad_ptrg)[i]) : "",
               quad_erg ? csv_float((*quad_erg)[i]) : ""});
  }
}

void run_flow_family(const RunConfig& cfg, RunMethod method,
                     const fs::path& out, MethodRecorder& rec) {
  if (method == RunMethod::ErgDiscrete) {
    guarded(rec, method, [&] {
      const auto& opts = *cfg.discrete;
      const auto seq = erg_discrete_sweep(cfg.model, opts.phi0, opts.sweep);
      const auto n_modes = opts.sweep.n_modes;
      json& entry = rec.ok(method);
      entry["outputs"] = {"flow.csv"};
      entry["values"] = {{"z_uv", seq.back()},
                         {"z_ir", seq.front()},
                         {"delta_z", seq.front() - seq.back()}};
      if (!cfg.write_csv) return;
      const std::int64_t stride =
          opts.output_stride > 0
              ? opts.output_stride
              : std::max<std::int64_t>(1, (n_modes + 1) / 10000);
      CsvWriter csv(out / "flow.csv", "k,phi,z_k");
      for (std::int64_t n = n_modes; n >= 0; --n) {
        if ((n_modes - n) % stride != 0 && n != 0) continue;
        const double k = n > 0 ? opts.sweep.omega(n) : 0.0;
        csv.row({csv_float(k), csv_float(opts.phi0),
                 csv_float(seq[static_cast<std::size_t>(n)])});
      }
    });
    return;
  }

  guarded(rec, method, [&] {
    const FlowEquation eq = method == RunMethod::PtrgFlow
                                ? FlowEquation::Ptrg
                                : FlowEquation::ErgContinuum;
    const auto traj = integrate_flow(cfg.model, cfg.grid, *cfg.flow, eq);
    const auto phis = cfg.grid.points();
    double max_dz = 0.0;
    for (std::size_t i = 0; i < phis.size(); ++i)
      max_dz = std::max(max_dz, std::abs(traj.terminal().z[i] -
                                         traj.initial().z[i]));
    json& entry = rec.ok(method);
    entry["outputs"] = {"flow.csv"};
    entry["values"] = {{"steps", traj.steps}, {"max_abs_delta_z", max_dz}};
    if (!cfg.write_csv) return;
    CsvWriter csv(out / "flow.csv", "k,phi,z_k");
    for (const auto& state : traj.states)
      for (std::size_t i = 0; i < phis.size(); ++i)
        csv.row({csv_float(state.k), csv_float(phis[i]),
                 csv_float(state.z[i])});
  });
}

void run_shell_family(const RunConfig& cfg, const fs::path& out,
                      MethodRecorder& rec) {
  guarded(rec, RunMethod::Shell, [&] {
    const auto& opts = *cfg.shell;
    const ShellSpec shell(opts.k_c, opts.dk);
    struct Row {
      double q, measure;
      ConstrainedIntegralResult f;
    };
    std::vector<Row> rows;
    for (double q : opts.q_values)
      rows.push_back({q, delta_constrained_measure(shell, q),
                      f_of_q(cfg.model, opts.phi0, shell, q)});
    rec.ok(RunMethod::Shell)["outputs"] = {"shell.csv"};
    if (!cfg.write_csv) return;
    CsvWriter csv(out / "shell.csv", "q,measure,f_q,sector_opp,sector_same");
    for (const auto& r : rows)
      csv.row({csv_float(r.q), csv_float(r.measure), csv_float(r.f.value),
               csv_float(r.f.sector_opposite), csv_float(r.f.sector_same)});
  });
}

void run_oracle_family(const RunConfig& cfg, const fs::path& out,
                       MethodRecorder& rec) {
  guarded(rec, RunMethod::Oracle, [&] {
    const auto& opts = *cfg.oracle;
    const OracleResult r =
        extract_wavefunction_correction(cfg.model, opts.phi0, opts.probe);
    json& entry = rec.ok(RunMethod::Oracle);
    entry["outputs"] = {"oracle.csv"};
    entry["values"] = {{"phi0", opts.phi0},
                       {"delta_z", r.slope},
                       {"delta_z_stderr", r.slope_stderr},
                       {"intercept", r.intercept},
                       {"intercept_stderr", r.intercept_stderr}};
    if (!cfg.write_csv) return;
    CsvWriter csv(out / "oracle.csv", "omega,c2,c2_err,fit_A,fit_B,resid");
    for (std::size_t i = 0; i < r.omegas.size(); ++i)
      csv.row({csv_float(r.omegas[i]), csv_float(r.c2[i]),
               csv_float(r.c2_err[i]), csv_float(r.intercept),
               csv_float(r.slope), csv_float(r.residuals[i])});
  });
}

const char* family_name(CommandFamily family) {
  switch (family) {
    case CommandFamily::ZEff: return "zeff";
    case CommandFamily::Flow: return "flow";
    case CommandFamily::Shell: return "shell";
    case CommandFamily::Oracle: return "oracle";
  }
  return "?";
}

}  // namespace

RunOutcome run_family(const RunConfig& cfg, CommandFamily family,
                      const fs::path& out_dir) {
  const auto selected = family_selection(cfg, family);
  if (selected.empty())
    throw ConfigError(std::string("config selects no method the '") +
                      family_name(family) + "' subcommand can run");
  if (family == CommandFamily::Flow && selected.size() > 1)
    throw ConfigError(
        "the flow subcommand runs exactly one of ptrg-flow, erg-flow, "
        "erg-discrete per invocation");
  fs::create_directories(out_dir);

  RunOutcome outcome;
  outcome.summary["tool_version"] = ZEFFLAB_VERSION;
  outcome.summary["config_hash"] = config_hash(cfg);
  outcome.summary["family"] = family_name(family);
  json methods = json::object();
  MethodRecorder rec{methods, outcome.exit_code};

  switch (family) {
    case CommandFamily::ZEff:
      run_zeff_family(cfg, selected, out_dir, rec);
      break;
    case CommandFamily::Flow:
      run_flow_family(cfg, selected.front(), out_dir, rec);
      break;
    case CommandFamily::Shell:
      run_shell_family(cfg, out_dir, rec);
      break;
    case CommandFamily::Oracle:
      run_oracle_family(cfg, out_dir, rec);
      break;
  }

  outcome.summary["methods"] = methods;
  json tolerances = {{"quadrature_rel_tol", kQuadratureRelTol},
                     {"shell_quadrature_rel_tol", kShellQuadRelTol}};
  if (cfg.flow) {
    tolerances["flow_rel_tol"] = cfg.flow->rel_tol;
    tolerances["flow_abs_tol"] = cfg.flow->abs_tol;
  }
  outcome.summary["tolerances"] = tolerances;

  if (cfg.write_json) {
    std::ofstream out(out_dir / "summary.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write summary.json");
    out << outcome.summary.dump(2) << "\n";
  }
  return outcome;
}

namespace {

// Minimal CSV reading for our own comma-separated numeric files.
std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.size() && line.back() == ',') cells.push_back("");
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::optional<double> parse_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::strtod(s.c_str(), nullptr);
}

}  // namespace

int write_report(const RunConfig& cfg, const fs::path& out_dir) {
  std::ifstream sin(out_dir / "summary.json", std::ios::binary);
  if (!sin)
    throw ConfigError("no summary.json in " + out_dir.string() +
                      "; run a computation first");
  json summary = json::parse(sin);
  if (summary.value("config_hash", "") != config_hash(cfg))
    throw ConfigError(
        "summary.json in " + out_dir.string() +
        " was produced by a different config (hash mismatch)");

  const auto phis = cfg.grid.points();
  const std::size_t n = phis.size();
  auto nan_row = [n] {
    return std::vector<std::optional<double>>(n, std::nullopt);
  };
  auto deriv = nan_row(), erg = nan_row(), qp = nan_row(), qe = nan_row(),
       flow_ptrg = nan_row(), flow_erg = nan_row();

  auto index_of_phi = [&](double phi) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(phis[i] - phi) <=
          1e-12 * std::max(1.0, std::abs(phis[i])))
        return i;
    return std::nullopt;
  };

  if (fs::exists(out_dir / "zeff.csv")) {
    const auto rows = read_csv(out_dir / "zeff.csv");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto idx = index_of_phi(std::strtod(rows[r][0].c_str(), nullptr));
      if (!idx) continue;
      deriv[*idx] = parse_cell(rows[r][6]);
      erg[*idx] = parse_cell(rows[r][7]);
    }
  }
  if (fs::exists(out_dir / "quadrature.csv")) {
    const auto rows = read_csv(out_dir / "quadrature.csv");
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto idx = index_of_phi(std::strtod(rows[r][0].c_str(), nullptr));
      if (!idx) continue;
      const double z_bare = cfg.model.z_bundle(phis[*idx]).f0;
      if (auto dz = parse_cell(rows[r][1])) qp[*idx] = z_bare + *dz;
      if (auto dz = parse_cell(rows[r][2])) qe[*idx] = z_bare + *dz;
    }
  }
  if (fs::exists(out_dir / "flow.csv") &&
      (summary["methods"].contains("ptrg-flow") ||
       summary["methods"].contains("erg-flow"))) {
    const auto rows = read_csv(out_dir / "flow.csv");
    if (rows.size() > 1) {
      double k_min = std::numeric_limits<double>::infinity();
      for (std::size_t r = 1; r < rows.size(); ++r)
        k_min = std::min(k_min, std::strtod(rows[r][0].c_str(), nullptr));
      auto& column =
          summary["methods"].contains("ptrg-flow") ? flow_ptrg : flow_erg;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        if (std::strtod(rows[r][0].c_str(), nullptr) != k_min) continue;
        const auto idx =
            index_of_phi(std::strtod(rows[r][1].c_str(), nullptr));
        if (idx) column[*idx] = parse_cell(rows[r][2]);
      }
    }
  }

  json report;
  report["tool_version"] = ZEFFLAB_VERSION;
  report["config_hash"] = config_hash(cfg);
  report["phi"] = phis;
  auto emit = [&](const char* key,
                  const std::vector<std::optional<double>>& col) {
    json arr = json::array();
    bool any = false;
    for (const auto& v : col) {
      if (v) {
        arr.push_back(*v);
        any = true;
      } else {
        arr.push_back(nullptr);
      }
    }
    if (any) report["z_eff"][key] = arr;
  };
  emit("derivative-expansion", deriv);
  emit("erg-oneloop", erg);
  emit("ptrg-quadrature", qp);
  emit("erg-quadrature", qe);
  emit("ptrg-flow", flow_ptrg);
  emit("erg-flow", flow_erg);

  for (const char* single : {"erg-discrete", "oracle"})
    if (summary["methods"].contains(single) &&
        summary["methods"][single].contains("values"))
      report[single] = summary["methods"][single]["values"];
  if (fs::exists(out_dir / "shell.csv")) {
    const auto rows = read_csv(out_dir / "shell.csv");
    json q = json::array(), f = json::array(), measure = json::array();
    for (std::size_t r = 1; r < rows.size(); ++r) {
      q.push_back(std::strtod(rows[r][0].c_str(), nullptr));
      measure.push_back(std::strtod(rows[r][1].c_str(), nullptr));
      f.push_back(std::strtod(rows[r][2].c_str(), nullptr));
    }
    report["shell"] = {{"q", q}, {"measure", measure}, {"f_q", f}};
  }

  if (cfg.write_json) {
    std::ofstream out(out_dir / "report.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write report.json");
    out << report.dump(2) << "\n";
  }
  if (cfg.write_csv) {
    CsvWriter csv(out_dir / "report.csv",
                  "phi,z_bare,deriv_expansion,erg_oneloop,ptrg_quadrature,"
                  "erg_quadrature,ptrg_flow,erg_flow");
    auto cell = [](const std::optional<double>& v) {
      return v ? csv_float(*v) : std::string();
    };
    for (std::size_t i = 0; i < n; ++i)
      csv.row({csv_float(phis[i]),
               csv_float(cfg.model.z_bundle(phis[i]).f0), cell(deriv[i]),
               cell(erg[i]), cell(qp[i]), cell(qe[i]), cell(flow_ptrg[i]),
               cell(flow_erg[i])});
  }
  return 0;
}

}  // namespace zeff
