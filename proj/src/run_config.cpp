#include "zeff/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "zeff/errors.hpp"
#include "zeff/shell_geometry.hpp"

namespace zeff {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known)
      fail("unknown key: " + it.key() +
           (where[0] ? std::string(" (in '") + where + "')" : std::string()));
  }
}

const json& require(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end())
    fail(std::string("missing key '") + key + "' in '" + where + "'");
  return *it;
}

double as_double(const json& v, const std::string& what) {
  if (!v.is_number()) fail("'" + what + "' must be a number");
  return v.get<double>();
}

std::int64_t as_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) fail("'" + what + "' must be an integer");
  return v.get<std::int64_t>();
}

bool as_bool(const json& v, const std::string& what) {
  if (!v.is_boolean()) fail("'" + what + "' must be a boolean");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& what) {
  if (!v.is_string()) fail("'" + what + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> as_double_list(const json& v, const std::string& what) {
  if (!v.is_array()) fail("'" + what + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_double(e, what));
  return out;
}

// Constructor invariants become config constraint violations.
template <typename F>
auto checked(F&& f, const char* where) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    fail(std::string("constraint violation in '") + where + "': " + e.what());
  }
}

FunctionSpec parse_spec(const json& j, const char* where) {
  if (!j.is_object()) fail(std::string("'") + where + "' must be an object");
  check_keys(j, where, {"polynomial", "named", "params"});
  const bool has_poly = j.contains("polynomial");
  const bool has_named = j.contains("named");
  if (has_poly == has_named)
    fail(std::string("'") + where +
         "' needs exactly one of 'polynomial' or 'named'");
  if (has_poly) {
    if (j.contains("params"))
      fail(std::string("'params' only applies to named specs in '") + where +
           "'");
    auto coeffs = as_double_list(j.at("polynomial"), where);
    return checked([&] { return FunctionSpec::polynomial(coeffs); }, where);
  }
  const std::string id = as_string(j.at("named"), where);
  std::map<std::string, double> params;
  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_object()) fail("'params' must be an object");
    for (auto it = p.begin(); it != p.end(); ++it)
      params[it.key()] = as_double(it.value(), "params." + it.key());
  }
  return checked([&] { return FunctionSpec::named(id, params); }, where);
}

json spec_to_json(const FunctionSpec& spec) {
  json j;
  if (spec.kind() == FunctionSpec::Kind::Polynomial) {
    j["polynomial"] = spec.coefficients();
  } else {
    j["named"] = spec.name();
    j["params"] = spec.params();
  }
  return j;
}

struct MethodName {
  RunMethod method;
  const char* name;
};
constexpr MethodName kMethodNames[] = {
    {RunMethod::DerivativeExpansion, "derivative-expansion"},
    {RunMethod::ErgOneLoop, "erg-oneloop"},
    {RunMethod::PtrgQuadrature, "ptrg-quadrature"},
    {RunMethod::ErgQuadrature, "erg-quadrature"},
    {RunMethod::PtrgFlow, "ptrg-flow"},
    {RunMethod::ErgFlow, "erg-flow"},
    {RunMethod::ErgDiscrete, "erg-discrete"},
    {RunMethod::Shell, "shell"},
    {RunMethod::Oracle, "oracle"},
};

}  // namespace

std::string to_string(RunMethod m) {
  for (const auto& [method, name] : kMethodNames)
    if (method == m) return name;
  return "?";
}

RunMethod method_from_string(const std::string& name) {
  for (const auto& [method, n] : kMethodNames)
    if (name == n) return method;
  fail("unknown method '" + name + "'");
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i < upto; ++i)
      if (text[i] == '\n') ++line;
    fail("syntax error at line " + std::to_string(line) + ": " + e.what());
  }
  if (!root.is_object()) fail("top-level config must be an object");
  check_keys(root, "", {"model", "grid", "methods", "out_dir", "formats",
                        "zeff", "flow", "discrete", "shell", "oracle"});

  // model
  const json& jm = require(root, "model", "config");
  if (!jm.is_object()) fail("'model' must be an object");
  check_keys(jm, "model", {"z", "v", "hbar"});
  FunctionSpec z = parse_spec(require(jm, "z", "model"), "model.z");
  FunctionSpec v = parse_spec(require(jm, "v", "model"), "model.v");
  const double hbar =
      jm.contains("hbar") ? as_double(jm.at("hbar"), "model.hbar") : 1.0;
  ScalarFieldModel model = checked(
      [&] { return ScalarFieldModel(std::move(z), std::move(v), hbar); },
      "model");

  // grid
  const json& jg = require(root, "grid", "config");
  if (!jg.is_object()) fail("'grid' must be an object");
  check_keys(jg, "grid", {"phi_min", "phi_max", "n"});
  FieldGrid grid = checked(
      [&] {
        return FieldGrid(
            as_double(require(jg, "phi_min", "grid"), "grid.phi_min"),
            as_double(require(jg, "phi_max", "grid"), "grid.phi_max"),
            static_cast<int>(as_int(require(jg, "n", "grid"), "grid.n")));
      },
      "grid");

  RunConfig cfg(std::move(model), grid);

  // methods
  const json& jms = require(root, "methods", "config");
  if (!jms.is_array() || jms.empty())
    fail("'methods' must be a non-empty array");
  for (const auto& e : jms) {
    const RunMethod m = method_from_string(as_string(e, "methods"));
    if (std::find(cfg.methods.begin(), cfg.methods.end(), m) !=
        cfg.methods.end())
      fail("duplicate method '" + to_string(m) + "'");
    cfg.methods.push_back(m);
  }

  if (root.contains("out_dir"))
    cfg.out_dir = as_string(root.at("out_dir"), "out_dir");

  if (root.contains("formats")) {
    const json& jf = root.at("formats");
    if (!jf.is_array() || jf.empty())
      fail("'formats' must be a non-empty array");
    cfg.write_csv = cfg.write_json = false;
    for (const auto& e : jf) {
      const std::string f = as_string(e, "formats");
      if (f == "csv")
        cfg.write_csv = true;
      else if (f == "json")
        cfg.write_json = true;
      else
        fail("unknown format '" + f + "'");
    }
  }

  if (root.contains("zeff")) {
    const json& jz = root.at("zeff");
    if (!jz.is_object()) fail("'zeff' must be an object");
    check_keys(jz, "zeff", {"coefficients"});
    if (jz.contains("coefficients")) {
      const json& jc = jz.at("coefficients");
      if (!jc.is_object()) fail("'zeff.coefficients' must be an object");
      check_keys(jc, "zeff.coefficients", {"c1", "c2", "c3", "c4"});
      CorrectionCoefficients c;
      c.c1 = as_double(require(jc, "c1", "zeff.coefficients"), "c1");
      c.c2 = as_double(require(jc, "c2", "zeff.coefficients"), "c2");
      c.c3 = as_double(require(jc, "c3", "zeff.coefficients"), "c3");
      c.c4 = as_double(require(jc, "c4", "zeff.coefficients"), "c4");
      cfg.zeff.coefficients = c;
    }
  }

  if (root.contains("flow")) {
    const json& jf = root.at("flow");
    if (!jf.is_object()) fail("'flow' must be an object");
    check_keys(jf, "flow", {"k_uv", "k_ir", "mode", "rel_tol", "abs_tol",
                            "max_steps", "snapshots"});
    FlowConfig fc;
    fc.k_uv = as_double(require(jf, "k_uv", "flow"), "flow.k_uv");
    if (jf.contains("k_ir")) fc.k_ir = as_double(jf.at("k_ir"), "flow.k_ir");
    if (jf.contains("mode")) {
      const std::string mode = as_string(jf.at("mode"), "flow.mode");
      if (mode == "frozen-oneloop")
        fc.mode = FlowMode::FrozenOneLoop;
      else if (mode == "running-z-frozen-v")
        fc.mode = FlowMode::RunningZFrozenV;
      else
        fail("unknown flow mode '" + mode + "'");
    }
    if (jf.contains("rel_tol"))
      fc.rel_tol = as_double(jf.at("rel_tol"), "flow.rel_tol");
    if (jf.contains("abs_tol"))
      fc.abs_tol = as_double(jf.at("abs_tol"), "flow.abs_tol");
    if (jf.contains("max_steps"))
      fc.max_steps = as_int(jf.at("max_steps"), "flow.max_steps");
    if (jf.contains("snapshots"))
      fc.snapshots = as_double_list(jf.at("snapshots"), "flow.snapshots");
    checked([&] { fc.validate(); return 0; }, "flow");
    cfg.flow = fc;
  }

  if (root.contains("discrete")) {
    const json& jd = root.at("discrete");
    if (!jd.is_object()) fail("'discrete' must be an object");
    check_keys(jd, "discrete",
               {"phi0", "n_modes", "epsilon", "include_constant_term",
                "mode_frequency", "output_stride"});
    DiscreteRunOptions d;
    d.phi0 = as_double(require(jd, "phi0", "discrete"), "discrete.phi0");
    d.sweep.n_modes =
        as_int(require(jd, "n_modes", "discrete"), "discrete.n_modes");
    d.sweep.epsilon =
        as_double(require(jd, "epsilon", "discrete"), "discrete.epsilon");
    if (jd.contains("include_constant_term"))
      d.sweep.include_constant_term =
          as_bool(jd.at("include_constant_term"), "discrete.include_constant_term");
    if (jd.contains("mode_frequency")) {
      const std::string f =
          as_string(jd.at("mode_frequency"), "discrete.mode_frequency");
      if (f == "fourier-periodic")
        d.sweep.mode_frequency = ModeFrequency::FourierPeriodic;
      else if (f == "lattice-sine")
        d.sweep.mode_frequency = ModeFrequency::LatticeSine;
      else
        fail("unknown mode_frequency '" + f + "'");
    }
    if (jd.contains("output_stride")) {
      d.output_stride = as_int(jd.at("output_stride"), "discrete.output_stride");
      if (d.output_stride < 0) fail("'discrete.output_stride' must be >= 0");
    }
    checked([&] { d.sweep.validate(); return 0; }, "discrete");
    cfg.discrete = d;
  }

  if (root.contains("shell")) {
    const json& js = root.at("shell");
    if (!js.is_object()) fail("'shell' must be an object");
    check_keys(js, "shell", {"phi0", "k_c", "dk", "q_values", "q_scan"});
    ShellRunOptions s;
    s.phi0 = as_double(require(js, "phi0", "shell"), "shell.phi0");
    s.k_c = as_double(require(js, "k_c", "shell"), "shell.k_c");
    s.dk = as_double(require(js, "dk", "shell"), "shell.dk");
    checked([&] { return ShellSpec(s.k_c, s.dk); }, "shell");
    const bool has_values = js.contains("q_values");
    const bool has_scan = js.contains("q_scan");
    if (has_values == has_scan)
      fail("'shell' needs exactly one of 'q_values' or 'q_scan'");
    if (has_values) {
      s.q_values = as_double_list(js.at("q_values"), "shell.q_values");
      if (s.q_values.empty()) fail("'shell.q_values' must not be empty");
    } else {
      const json& jq = js.at("q_scan");
      if (!jq.is_object()) fail("'shell.q_scan' must be an object");
      check_keys(jq, "shell.q_scan", {"q_min", "q_max", "n"});
      const double q_min = as_double(require(jq, "q_min", "q_scan"), "q_min");
      const double q_max = as_double(require(jq, "q_max", "q_scan"), "q_max");
      const auto n = as_int(require(jq, "n", "q_scan"), "q_scan.n");
      if (n < 2 || !(q_min < q_max)) fail("'shell.q_scan' needs q_min < q_max and n >= 2");
      for (std::int64_t i = 0; i < n; ++i)
        s.q_values.push_back(q_min + (q_max - q_min) * i / (n - 1));
    }
    cfg.shell = s;
  }

  if (root.contains("oracle")) {
    const json& jo = root.at("oracle");
    if (!jo.is_object()) fail("'oracle' must be an object");
    check_keys(jo, "oracle",
               {"phi0", "period", "modes", "epsilons", "slices",
                "richardson_levels_a", "richardson_levels_eps"});
    OracleRunOptions o;
    o.phi0 = as_double(require(jo, "phi0", "oracle"), "oracle.phi0");
    o.probe.period = as_double(require(jo, "period", "oracle"), "oracle.period");
    const json& jmodes = require(jo, "modes", "oracle");
    if (!jmodes.is_array()) fail("'oracle.modes' must be an array");
    for (const auto& e : jmodes)
      o.probe.modes.push_back(static_cast<int>(as_int(e, "oracle.modes")));
    o.probe.epsilons = as_double_list(require(jo, "epsilons", "oracle"),
                                      "oracle.epsilons");
    o.probe.slices = static_cast<int>(
        as_int(require(jo, "slices", "oracle"), "oracle.slices"));
    if (jo.contains("richardson_levels_a"))
      o.probe.richardson_levels_a = static_cast<int>(
          as_int(jo.at("richardson_levels_a"), "oracle.richardson_levels_a"));
    if (jo.contains("richardson_levels_eps"))
      o.probe.richardson_levels_eps = static_cast<int>(as_int(
          jo.at("richardson_levels_eps"), "oracle.richardson_levels_eps"));
    checked([&] { o.probe.validate(); return 0; }, "oracle");
    cfg.oracle = o;
  }

  // selected methods must have their sub-configs
  auto selected = [&](RunMethod m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) !=
           cfg.methods.end();
  };
  if ((selected(RunMethod::PtrgFlow) || selected(RunMethod::ErgFlow)) &&
      !cfg.flow)
    fail("methods include a continuum flow but the 'flow' section is missing");
  if (selected(RunMethod::ErgDiscrete) && !cfg.discrete)
    fail("method 'erg-discrete' needs the 'discrete' section");
  if (selected(RunMethod::Shell) && !cfg.shell)
    fail("method 'shell' needs the 'shell' section");
  if (selected(RunMethod::Oracle) && !cfg.oracle)
    fail("method 'oracle' needs the 'oracle' section");

  return cfg;
}

nlohmann::json serialize_config(const RunConfig& cfg) {
  json root;
  root["model"]["z"] = spec_to_json(cfg.model.z());
  root["model"]["v"] = spec_to_json(cfg.model.v());
  root["model"]["hbar"] = cfg.model.hbar();
  root["grid"]["phi_min"] = cfg.grid.phi_min();
  root["grid"]["phi_max"] = cfg.grid.phi_max();
  root["grid"]["n"] = cfg.grid.n();
  root["methods"] = json::array();
  for (RunMethod m : cfg.methods) root["methods"].push_back(to_string(m));
  root["out_dir"] = cfg.out_dir;
  root["formats"] = json::array();
  if (cfg.write_csv) root["formats"].push_back("csv");
  if (cfg.write_json) root["formats"].push_back("json");
  if (cfg.zeff.coefficients) {
    const auto& c = *cfg.zeff.coefficients;
    root["zeff"]["coefficients"] = {
        {"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"c4", c.c4}};
  }
  if (cfg.flow) {
    const auto& f = *cfg.flow;
    root["flow"] = {
        {"k_uv", f.k_uv},
        {"k_ir", f.k_ir},
        {"mode", f.mode == FlowMode::FrozenOneLoop ? "frozen-oneloop"
                                                   : "running-z-frozen-v"},
        {"rel_tol", f.rel_tol},
        {"abs_tol", f.abs_tol},
        {"max_steps", f.max_steps},
        {"snapshots", f.snapshots}};
  }
  if (cfg.discrete) {
    const auto& d = *cfg.discrete;
    root["discrete"] = {
        {"phi0", d.phi0},
        {"n_modes", d.sweep.n_modes},
        {"epsilon", d.sweep.epsilon},
        {"include_constant_term", d.sweep.include_constant_term},
        {"mode_frequency",
         d.sweep.mode_frequency == ModeFrequency::FourierPeriodic
             ? "fourier-periodic"
             : "lattice-sine"},
        {"output_stride", d.output_stride}};
  }
  if (cfg.shell) {
    const auto& s = *cfg.shell;
    root["shell"] = {{"phi0", s.phi0},
                     {"k_c", s.k_c},
                     {"dk", s.dk},
                     {"q_values", s.q_values}};
  }
  if (cfg.oracle) {
    const auto& o = *cfg.oracle;
    root["oracle"] = {
        {"phi0", o.phi0},
        {"period", o.probe.period},
        {"modes", o.probe.modes},
        {"epsilons", o.probe.epsilons},
        {"slices", o.probe.slices},
        {"richardson_levels_a", o.probe.richardson_levels_a},
        {"richardson_levels_eps", o.probe.richardson_levels_eps}};
  }
  return root;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string dump = serialize_config(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_float(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace zeff
