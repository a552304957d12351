#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "freesurf/cli/commands.hpp"

namespace {

using namespace freesurf;
using namespace freesurf::cli;

void fail_json(const std::string& kind, const std::string& msg) {
  json e = {{"error", kind}, {"message", msg}};
  std::cerr << e.dump() << '\n';
}

fs::path default_root() {
  if (const char* env = std::getenv("FREESURF_OUT"); env && *env) return env;
  return "runs";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-surface ideal flow via conformal maps of the disk"};
  app.require_subcommand(1, 1);

  std::string config_path, preset_name, out_dir;
  int jobs = 1;
  bool svg = false, list = false, print = false;
  for (const char* name : {"simulate", "exact", "verify", "scaling"}) {
    auto* sc = app.add_subcommand(name);
    sc->add_option("--config", config_path, "JSON config file");
    sc->add_option("--preset", preset_name, "named preset");
    sc->add_option("--out", out_dir, "output directory");
    sc->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sc->add_flag("--svg", svg, "write SVG plots");
    sc->add_flag("--list-presets", list, "print preset names and exit");
    sc->add_flag("--print-config", print, "print the resolved config and exit");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    fail_json("usage", e.what());
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (list) {
    for (const auto& n : preset_names()) std::cout << n << '\n';
    return 0;
  }

  try {
    RunConfig cfg;
    if (!preset_name.empty()) cfg = preset(preset_name);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InvalidInput("cannot read config '" + config_path + "'");
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
      }
      cfg = from_json(j, cfg);
    }
    if (preset_name.empty() && config_path.empty()) cfg.preset = "";
    if (!cfg.preset.empty() && cfg.command != command && !preset_name.empty()) {
      throw InvalidInput("preset '" + preset_name + "' belongs to the '" + cfg.command + "' command");
    }
    cfg.command = command;
    if (svg) cfg.output.svg = true;
    fs::path out = !out_dir.empty()      ? fs::path(out_dir)
                   : !cfg.out_dir.empty() ? fs::path(cfg.out_dir)
                                          : default_root() / (cfg.preset.empty() ? command : cfg.preset);
    cfg.validate();
    if (print) {
      std::cout << to_json(cfg).dump(2) << '\n';
      return 0;
    }

    int rc = 0;
    if (command == "simulate") rc = cmd_simulate(cfg, out);
    else if (command == "exact") rc = cmd_exact(cfg, out);
    else if (command == "verify") rc = cmd_verify(cfg, out, jobs);
    else rc = cmd_scaling(cfg, out);
    std::cout << out.string() << '\n';
    return rc;
  } catch (const InvalidInput& e) {
    fail_json("invalid_config", e.what());
  } catch (const DomainError& e) {
    fail_json("domain_error", e.what());
  } catch (const std::exception& e) {
    fail_json("runtime_error", e.what());
  }
  return 2;
}
