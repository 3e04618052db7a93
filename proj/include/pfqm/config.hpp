#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfqm/dispersion.hpp"
#include "pfqm/dynamics.hpp"
#include "pfqm/spectral.hpp"

namespace pfqm {

// Raised for any malformed, unknown or missing configuration entry.
// `path` is "section.key" (or just "section").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path(path) {}
  std::string path;
};

struct IniDoc {
  // section -> key -> raw value string
  std::map<std::string, std::map<std::string, std::string>> sections;
};

IniDoc parse_ini_string(const std::string& text);
IniDoc parse_ini_file(const std::string& path);

// Typed accessor over an IniDoc. Every key a command reads is recorded
// together with its effective value; after assembly, leftover keys are
// rejected and the recorded set is what gets echoed back to disk. Unit
// checking is by construction: the exact suffixed key names are the schema.
class ConfigReader {
 public:
  explicit ConfigReader(IniDoc doc) : doc_(std::move(doc)) {}

  double get_double(const std::string& sec, const std::string& key);
  double get_double(const std::string& sec, const std::string& key,
                    double fallback);
  long get_int(const std::string& sec, const std::string& key);
  long get_int(const std::string& sec, const std::string& key, long fallback);
  bool get_bool(const std::string& sec, const std::string& key, bool fallback);
  std::string get_enum(const std::string& sec, const std::string& key,
                       const std::vector<std::string>& allowed,
                       const std::string& fallback);
  std::vector<double> get_double_list(const std::string& sec,
                                      const std::string& key);
  std::optional<double> get_optional_double(const std::string& sec,
                                            const std::string& key);

  bool has(const std::string& sec, const std::string& key) const;
  bool has_section(const std::string& sec) const;

  // Throws ConfigError on any section/key that was never consumed.
  void reject_unknown() const;

  // Effective configuration (consumed keys with their values) as INI text.
  std::string effective_ini() const;

 private:
  std::string* find(const std::string& sec, const std::string& key);
  void record(const std::string& sec, const std::string& key,
              const std::string& value);

  IniDoc doc_;
  std::map<std::string, std::map<std::string, std::string>> consumed_;
  std::vector<std::pair<std::string, std::string>> order_;  // echo order
};

// ---- section loaders --------------------------------------------------

Grid load_grid(ConfigReader& cfg);
CavityParams load_cavity(ConfigReader& cfg);

// Effective mass of the lower branch bottom, hbar^2/(meV um^2) units.
double branch_bottom_mass(const CavityParams& p);

// [kinetic]: type = curvature | constant_mass | fractional | tabulated.
// constant_mass defaults its mass to the branch-bottom mass of `cavity`;
// fractional defaults s to 5/6 and fits the coefficient to the curvature
// multiplier on (0, 0.5] when not given explicitly.
KineticSpec load_kinetic(ConfigReader& cfg, const CavityParams& cavity);

PumpSpec load_pump(ConfigReader& cfg);
PotentialSpec load_potential(ConfigReader& cfg);
ModelParams load_model(ConfigReader& cfg, const CavityParams& cavity, int dim);

struct RunConfig {
  double t_final = 10.0;       // ps
  double dt = 1e-2;            // ps
  long observer_stride = 10;
  long snapshot_stride = 0;    // 0: final snapshot only
  std::string initial = "gaussian";  // zero | gaussian | noise
  double initial_width = 1.0;        // um
  double initial_amplitude = 1.0;
  double noise_amplitude = 0.0;
  unsigned long long seed = 0;
  double watchdog_max_abs = 1e8;
  long local_substeps = 4;
  std::string splitting = "lkl";  // lkl | klk
};
RunConfig load_run(ConfigReader& cfg);

// Best least-max-error single-scale fit of c * k^(2s) to the curvature
// multiplier on a uniform grid over (0, k_hi]; returns c.
double fit_fractional_coefficient(const CavityParams& cavity, double s,
                                  double k_hi, int n_samples, bool half);

}  // namespace pfqm
