#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pfqm/config.hpp"
#include "pfqm/observables.hpp"

namespace pfqm {

// Command implementations behind the CLI, usable directly from tests.
// Each writes its outputs plus an echo of the effective configuration
// (effective.ini) under out_dir, creating the directory if needed.
// Configuration problems raise ConfigError, runtime faults evolve_error.

void cmd_dispersion(const IniDoc& doc, const std::string& out_dir);

struct AssembledRun {
  Grid grid;
  CavityParams cavity;
  ModelParams params;
  RunConfig run;
};

// Loads [grid], [cavity], [kinetic], [model], [pump], [potential], [run].
// Does not call reject_unknown(); the caller does after consuming any
// command-specific sections.
AssembledRun assemble_run(ConfigReader& cfg);

SpectralField initial_field(const Grid& grid, const RunConfig& run);

struct EvolveOutputs {
  double sweep_value;    // NaN for plain runs
  double omega_i;        // effective pump frequency, meV
  double mass_final;
  double max_abs_final;
  double ring_radius;    // NaN in 1D
  bool no_ring;
  double second_moment;  // NaN in 1D
};

// Plain run, or a sweep over the pump wavevector along the diagonal when a
// [sweep] section is present (k_i = (a/sqrt2)(1,1) per listed value).
// Sweep points run concurrently on up to `threads` threads, each writing to
// its own subdirectory.
std::vector<EvolveOutputs> cmd_evolve(
    const IniDoc& doc, const std::string& out_dir, int threads = 1,
    std::optional<unsigned long long> seed_override = std::nullopt);

void cmd_planewave(const IniDoc& doc, const std::string& out_dir);
void cmd_response(const IniDoc& doc, const std::string& out_dir);

// Invariant suite (transforms, plane waves, splitting order, cubic roots,
// mass balance). Prints one line per check with the measured numbers;
// returns 0 iff everything passed.
int cmd_selftest(std::ostream& out);

}  // namespace pfqm
