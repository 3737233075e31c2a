#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "zeff/errors.hpp"
#include "zeff/run_config.hpp"
#include "zeff/version.hpp"

namespace {

struct CommandArgs {
  std::string config_path;
  std::string out_dir;  // empty: fall back to the config's out_dir
};

zeff::RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw zeff::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return zeff::parse_config(text.str());
}

int dispatch(const CommandArgs& args,
             const std::optional<zeff::CommandFamily>& family) {
  const zeff::RunConfig cfg = load_config(args.config_path);
  const std::filesystem::path out =
      args.out_dir.empty() ? cfg.out_dir : args.out_dir;
  if (!family) return zeff::write_report(cfg, out);
  const auto outcome = zeff::run_family(cfg, *family, out);
  for (const auto& [name, entry] : outcome.summary["methods"].items()) {
    std::cout << name << ": " << entry["status"].get<std::string>();
    if (entry.contains("message"))
      std::cout << " (" << entry["message"].get<std::string>() << ")";
    std::cout << "\n";
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-loop kinetic-coefficient laboratory"};
  app.set_version_flag("--version", ZEFFLAB_VERSION);
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd;
    std::optional<zeff::CommandFamily> family;
    CommandArgs args;
  };
  std::vector<Sub> subs;
  auto add = [&](const char* name, const char* desc,
                 std::optional<zeff::CommandFamily> family) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    subs.push_back({cmd, family, {}});
    CommandArgs& args = subs.back().args;
    cmd->add_option("--config", args.config_path, "run configuration (JSON)")
        ->required();
    cmd->add_option("--out", args.out_dir,
                    "output directory (default: the config's out_dir)");
  };
  subs.reserve(5);
  add("zeff", "closed-form corrections and frozen one-loop quadratures",
      zeff::CommandFamily::ZEff);
  add("flow", "integrate one RG flow (continuum or discrete sweep)",
      zeff::CommandFamily::Flow);
  add("shell", "momentum-shell measures and the constrained integral F(q)",
      zeff::CommandFamily::Shell);
  add("oracle", "lattice determinant probe of the kinetic correction",
      zeff::CommandFamily::Oracle);
  add("report", "merge previous outputs into a comparison document",
      std::nullopt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1, --help/--version 0
  }

  try {
    for (const auto& sub : subs)
      if (sub.cmd->parsed()) return dispatch(sub.args, sub.family);
    return 1;
  } catch (const zeff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const zeff::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
