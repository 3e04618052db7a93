// End-to-end checks of the pfqm binary: exit codes, help text, and the
// determinism contract. The binary path arrives as argv[1] from ctest.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_binary;

std::string sandbox(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "pfqm_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

int run(const std::string& args) {
  const std::string cmd = g_binary + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string write_cfg(const std::string& dir, const std::string& text) {
  const std::string path = dir + "/config.ini";
  std::ofstream f(path);
  f << text;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("selftest subcommand exits zero") { CHECK(run("selftest") == 0); }

TEST_CASE("dispersion run and determinism") {
  const std::string dir = sandbox("disp");
  const std::string cfg = write_cfg(dir, "[dispersion]\nsamples = 64\n");
  CHECK(run("dispersion --config " + cfg + " --out " + dir + "/out1") == 0);
  CHECK(run("dispersion --config " + cfg + " --out " + dir + "/out2") == 0);
  CHECK(fs::exists(dir + "/out1/dispersion.csv"));
  CHECK(slurp(dir + "/out1/dispersion.csv") ==
        slurp(dir + "/out2/dispersion.csv"));
}

TEST_CASE("config errors exit 2 and name the key") {
  const std::string dir = sandbox("bad");
  const std::string cfg =
      write_cfg(dir, "[dispersion]\nsamples = 64\nwat = 1\n");
  CHECK(run("dispersion --config " + cfg + " --out " + dir + "/out") == 2);
  CHECK(run("dispersion --config " + dir + "/missing.ini --out " + dir) == 2);

  // bad evolve config: gaussian pump without width
  const std::string cfg2 = write_cfg(
      dir,
      "[grid]\ndim = 1\nnx = 32\nlx_um = 16\n"
      "[pump]\nprofile = gaussian\namplitude_mev = 1\n"
      "[run]\nt_final_ps = 0.1\ndt_ps = 0.01\n");
  CHECK(run("evolve --config " + cfg2 + " --out " + dir + "/out2") == 2);
}

TEST_CASE("runtime faults exit 3") {
  const std::string dir = sandbox("fault");
  // relaxation gain above the inflection with a tight watchdog
  const std::string cfg = write_cfg(
      dir,
      "[grid]\ndim = 1\nnx = 64\nlx_um = 20\n"
      "[kinetic]\ntype = curvature\n"
      "[model]\neta = 5.0\n"
      "[run]\nt_final_ps = 50\ndt_ps = 0.05\ninitial = noise\n"
      "noise_amplitude = 1.0\nwatchdog_max_abs = 10\n");
  CHECK(run("evolve --config " + cfg + " --out " + dir + "/out --seed 1") == 3);
}

TEST_CASE("evolve byte-identical outputs across invocations") {
  const std::string dir = sandbox("det");
  const std::string cfg = write_cfg(
      dir,
      "[grid]\ndim = 1\nnx = 32\nlx_um = 16\n"
      "[kinetic]\ntype = curvature\n"
      "[model]\nalpha_mev_um = 0.1\ngamma_per_ps = 0.2\n"
      "[pump]\nprofile = homogeneous\namplitude_mev = 0.3\nomega_i_mev = 0.1\n"
      "[run]\nt_final_ps = 0.2\ndt_ps = 0.01\nobserver_stride = 4\n");
  CHECK(run("evolve --config " + cfg + " --out " + dir + "/o1") == 0);
  CHECK(run("evolve --config " + cfg + " --out " + dir + "/o2") == 0);
  CHECK(slurp(dir + "/o1/series.csv") == slurp(dir + "/o2/series.csv"));
  CHECK(slurp(dir + "/o1/final.pfqm") == slurp(dir + "/o2/final.pfqm"));
  CHECK(slurp(dir + "/o1/effective.ini") == slurp(dir + "/o2/effective.ini"));
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-pfqm-binary>\n");
    return 1;
  }
  g_binary = argv[1];
  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv + 1);
  return ctx.run();
}
