// pfqm command line frontend: dispersion | evolve | planewave | response |
// selftest. Exit codes: 0 ok, 1 selftest failure, 2 configuration error,
// 3 runtime fault.

#include <CLI11.hpp>
#include <iostream>

#include "pfqm/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spectral polariton condensate simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "pfqm_out";
  int threads = 1;
  unsigned long long seed = 0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* copt = cmd->add_option("--config", config_path, "config file (ini)");
    if (needs_config) copt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--threads", threads, "worker threads for sweeps")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "seed for the optional noise initial state")
        ->each([&](const std::string&) { seed_given = true; });
  };

  auto* c_disp = app.add_subcommand("dispersion", "branch/multiplier tables");
  add_common(c_disp, true);
  auto* c_evolve = app.add_subcommand("evolve", "time evolution runs");
  add_common(c_evolve, true);
  auto* c_pw = app.add_subcommand("planewave", "plane-wave branch curves");
  add_common(c_pw, true);
  auto* c_resp = app.add_subcommand("response", "linear response k-maps");
  add_common(c_resp, true);
  auto* c_self = app.add_subcommand("selftest", "run the invariant suite");
  add_common(c_self, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_self->parsed()) return pfqm::cmd_selftest(std::cout);
    const pfqm::IniDoc doc = pfqm::parse_ini_file(config_path);
    if (c_disp->parsed()) {
      pfqm::cmd_dispersion(doc, out_dir);
    } else if (c_evolve->parsed()) {
      pfqm::cmd_evolve(doc, out_dir, threads,
                       seed_given ? std::optional<unsigned long long>(seed)
                                  : std::nullopt);
    } else if (c_pw->parsed()) {
      pfqm::cmd_planewave(doc, out_dir);
    } else if (c_resp->parsed()) {
      pfqm::cmd_response(doc, out_dir);
    }
  } catch (const pfqm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
