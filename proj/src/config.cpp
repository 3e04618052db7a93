#include "pfqm/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pfqm {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

IniDoc parse_ini_string(const std::string& text) {
  IniDoc doc;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno),
                          "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(lineno), "empty section");
      doc.sections[section];  // allow empty sections
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno),
                        "expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno),
                        "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (doc.sections[section].count(key))
      throw ConfigError(section + "." + key, "duplicate key");
    doc.sections[section][key] = value;
  }
  return doc;
}

IniDoc parse_ini_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_ini_string(ss.str());
}

std::string* ConfigReader::find(const std::string& sec,
                                const std::string& key) {
  auto s = doc_.sections.find(sec);
  if (s == doc_.sections.end()) return nullptr;
  auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  return &k->second;
}

void ConfigReader::record(const std::string& sec, const std::string& key,
                          const std::string& value) {
  if (!consumed_[sec].count(key)) order_.emplace_back(sec, key);
  consumed_[sec][key] = value;
  auto s = doc_.sections.find(sec);
  if (s != doc_.sections.end()) s->second.erase(key);
}

bool ConfigReader::has(const std::string& sec, const std::string& key) const {
  auto s = doc_.sections.find(sec);
  return s != doc_.sections.end() && s->second.count(key) > 0;
}

bool ConfigReader::has_section(const std::string& sec) const {
  return doc_.sections.count(sec) > 0;
}

double ConfigReader::get_double(const std::string& sec,
                                const std::string& key) {
  std::string* raw = find(sec, key);
  if (!raw) throw ConfigError(sec + "." + key, "required key is missing");
  try {
    size_t pos = 0;
    const double v = std::stod(*raw, &pos);
    if (pos != raw->size()) throw std::invalid_argument("trailing characters");
    record(sec, key, *raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(sec + "." + key, "not a number: '" + *raw + "'");
  }
}

double ConfigReader::get_double(const std::string& sec, const std::string& key,
                                double fallback) {
  if (!has(sec, key)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", fallback);
    record(sec, key, buf);
    return fallback;
  }
  return get_double(sec, key);
}

long ConfigReader::get_int(const std::string& sec, const std::string& key) {
  std::string* raw = find(sec, key);
  if (!raw) throw ConfigError(sec + "." + key, "required key is missing");
  try {
    size_t pos = 0;
    const long v = std::stol(*raw, &pos);
    if (pos != raw->size()) throw std::invalid_argument("trailing characters");
    record(sec, key, *raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(sec + "." + key, "not an integer: '" + *raw + "'");
  }
}

long ConfigReader::get_int(const std::string& sec, const std::string& key,
                           long fallback) {
  if (!has(sec, key)) {
    record(sec, key, std::to_string(fallback));
    return fallback;
  }
  return get_int(sec, key);
}

bool ConfigReader::get_bool(const std::string& sec, const std::string& key,
                            bool fallback) {
  if (!has(sec, key)) {
    record(sec, key, fallback ? "true" : "false");
    return fallback;
  }
  std::string* raw = find(sec, key);
  if (*raw == "true" || *raw == "1") {
    record(sec, key, "true");
    return true;
  }
  if (*raw == "false" || *raw == "0") {
    record(sec, key, "false");
    return false;
  }
  throw ConfigError(sec + "." + key, "expected true/false: '" + *raw + "'");
}

std::string ConfigReader::get_enum(const std::string& sec,
                                   const std::string& key,
                                   const std::vector<std::string>& allowed,
                                   const std::string& fallback) {
  std::string value = fallback;
  if (has(sec, key)) value = *find(sec, key);
  if (std::find(allowed.begin(), allowed.end(), value) == allowed.end()) {
    std::string opts;
    for (const auto& a : allowed) opts += (opts.empty() ? "" : " | ") + a;
    throw ConfigError(sec + "." + key,
                      "'" + value + "' is not one of: " + opts);
  }
  record(sec, key, value);
  return value;
}

std::vector<double> ConfigReader::get_double_list(const std::string& sec,
                                                  const std::string& key) {
  std::string* raw = find(sec, key);
  if (!raw) throw ConfigError(sec + "." + key, "required key is missing");
  std::vector<double> out;
  std::stringstream ss(*raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(sec + "." + key, "bad list element: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(sec + "." + key, "empty list");
  record(sec, key, *raw);
  return out;
}

std::optional<double> ConfigReader::get_optional_double(
    const std::string& sec, const std::string& key) {
  if (!has(sec, key)) return std::nullopt;
  return get_double(sec, key);
}

void ConfigReader::reject_unknown() const {
  for (const auto& [sec, keys] : doc_.sections) {
    if (!consumed_.count(sec) && !keys.empty())
      throw ConfigError(sec, "unknown section");
    for (const auto& [key, value] : keys)
      throw ConfigError(sec + "." + key, "unknown key");
    if (keys.empty() && !consumed_.count(sec))
      throw ConfigError(sec, "unknown section");
  }
}

std::string ConfigReader::effective_ini() const {
  std::string out;
  std::string current;
  for (const auto& [sec, key] : order_) {
    if (sec != current) {
      if (!out.empty()) out += "\n";
      out += "[" + sec + "]\n";
      current = sec;
    }
    out += key + " = " + consumed_.at(sec).at(key) + "\n";
  }
  return out;
}

// ---- section loaders --------------------------------------------------

Grid load_grid(ConfigReader& cfg) {
  const long dim = cfg.get_int("grid", "dim");
  if (dim != 1 && dim != 2)
    throw ConfigError("grid.dim", "must be 1 or 2");
  try {
    if (dim == 1) {
      const long nx = cfg.get_int("grid", "nx");
      const double lx = cfg.get_double("grid", "lx_um");
      return Grid::make_1d(static_cast<int>(nx), lx);
    }
    const long nx = cfg.get_int("grid", "nx");
    const long ny = cfg.get_int("grid", "ny");
    const double lx = cfg.get_double("grid", "lx_um");
    const double ly = cfg.get_double("grid", "ly_um");
    return Grid::make_2d(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("grid", e.what());
  }
}

CavityParams load_cavity(ConfigReader& cfg) {
  CavityParams p;
  const CavityParams defaults = default_cavity();
  p.exciton_energy =
      cfg.get_double("cavity", "exciton_energy_mev", defaults.exciton_energy);
  p.cavity_offset =
      cfg.get_double("cavity", "cavity_offset_mev", defaults.cavity_offset);
  p.photon_mass = mass_from_electron_masses(
      cfg.get_double("cavity", "photon_mass_me", 1.0e-4));
  p.exciton_mass = mass_from_electron_masses(
      cfg.get_double("cavity", "exciton_mass_me", 0.5));
  p.rabi = cfg.get_double("cavity", "rabi_mev", defaults.rabi);
  p.paraxial = cfg.get_bool("cavity", "paraxial", true);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("cavity", e.what());
  }
  return p;
}

double branch_bottom_mass(const CavityParams& p) {
  return 1.0 / lower_branch_curvature(0.0, p);
}

double fit_fractional_coefficient(const CavityParams& cavity, double s,
                                  double k_hi, int n_samples, bool half) {
  // single-scale minimax fit: c = 2/(max u + min u), u = k^{2s}/g(k)
  const KineticSpec curv = curvature_spec(cavity, half);
  double umin = 0.0, umax = 0.0;
  for (int i = 1; i <= n_samples; ++i) {
    const double k = k_hi * i / n_samples;
    const double u = std::pow(k, 2.0 * s) / kinetic_prefactor_g(k, curv);
    if (i == 1) {
      umin = umax = u;
    } else {
      umin = std::min(umin, u);
      umax = std::max(umax, u);
    }
  }
  // returned value is the stored coefficient, which the spec halves again
  // when prefactor_half is set
  return 2.0 / (umax + umin) / (half ? 0.5 : 1.0);
}

KineticSpec load_kinetic(ConfigReader& cfg, const CavityParams& cavity) {
  const std::string type = cfg.get_enum(
      "kinetic", "type",
      {"curvature", "constant_mass", "fractional", "tabulated"}, "curvature");
  const bool half = cfg.get_bool("kinetic", "prefactor_half", true);
  try {
    if (type == "curvature") return curvature_spec(cavity, half);
    if (type == "constant_mass") {
      const auto me = cfg.get_optional_double("kinetic", "mass_me");
      const double mass =
          me ? mass_from_electron_masses(*me) : branch_bottom_mass(cavity);
      KineticSpec spec = constant_mass_spec(mass, half);
      spec.validate();
      return spec;
    }
    if (type == "fractional") {
      const double s = cfg.get_double("kinetic", "s", 5.0 / 6.0);
      const auto c = cfg.get_optional_double("kinetic", "coefficient_mev_um2s");
      KineticSpec spec = fractional_spec(
          s, c ? *c : fit_fractional_coefficient(cavity, s, 0.5, 50, half),
          half);
      spec.validate();
      return spec;
    }
    Tabulated tab;
    tab.k_nodes = cfg.get_double_list("kinetic", "table_k_per_um");
    tab.g_values = cfg.get_double_list("kinetic", "table_g_mev");
    KineticSpec spec{tab, half};
    spec.validate();
    return spec;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("kinetic", e.what());
  }
}

PumpSpec load_pump(ConfigReader& cfg) {
  PumpSpec pump;
  const std::string profile = cfg.get_enum(
      "pump", "profile", {"none", "homogeneous", "gaussian"}, "none");
  if (profile == "none") return pump;
  pump.k_i_x = cfg.get_double("pump", "k_i_x_per_um", 0.0);
  pump.k_i_y = cfg.get_double("pump", "k_i_y_per_um", 0.0);
  pump.omega_i = cfg.get_double("pump", "omega_i_mev", 0.0);
  if (profile == "homogeneous") {
    pump.profile = HomogeneousPump{cfg.get_double("pump", "amplitude_mev")};
  } else {
    GaussianPump g;
    g.amplitude = cfg.get_double("pump", "amplitude_mev");
    g.center_x = cfg.get_double("pump", "center_x_um", 0.0);
    g.center_y = cfg.get_double("pump", "center_y_um", 0.0);
    g.width = cfg.get_double("pump", "width_um");
    pump.profile = g;
  }
  try {
    pump.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("pump", e.what());
  }
  return pump;
}

PotentialSpec load_potential(ConfigReader& cfg) {
  PotentialSpec pot;
  const std::string type = cfg.get_enum(
      "potential", "type", {"none", "harmonic", "mexican_hat"}, "none");
  if (type == "harmonic") {
    pot.form =
        HarmonicPotential{cfg.get_double("potential", "kappa_v_mev_per_um2")};
  } else if (type == "mexican_hat") {
    MexicanHatPotential m;
    m.strength = cfg.get_double("potential", "kappa_v_mev_per_um2");
    m.hat_amplitude = cfg.get_double("potential", "hat_amplitude_mev");
    m.hat_width = cfg.get_double("potential", "hat_width_um");
    pot.form = m;
  }
  try {
    pot.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("potential", e.what());
  }
  return pot;
}

ModelParams load_model(ConfigReader& cfg, const CavityParams& cavity,
                       int dim) {
  ModelParams p;
  p.alpha = dim == 2 ? cfg.get_double("model", "alpha_mev_um2", 0.0)
                     : cfg.get_double("model", "alpha_mev_um", 0.0);
  p.gamma = cfg.get_double("model", "gamma_per_ps", 0.0);
  p.eta = cfg.get_double("model", "eta", 0.0);
  p.omega = cfg.get_double("model", "omega_mev", 0.0);
  p.kinetic = load_kinetic(cfg, cavity);
  p.pump = load_pump(cfg);
  p.potential = load_potential(cfg);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  }
  return p;
}

RunConfig load_run(ConfigReader& cfg) {
  RunConfig r;
  r.t_final = cfg.get_double("run", "t_final_ps", r.t_final);
  r.dt = cfg.get_double("run", "dt_ps", r.dt);
  r.observer_stride = cfg.get_int("run", "observer_stride", r.observer_stride);
  r.snapshot_stride = cfg.get_int("run", "snapshot_stride", r.snapshot_stride);
  r.initial = cfg.get_enum("run", "initial", {"zero", "gaussian", "noise"},
                           r.initial);
  r.initial_width = cfg.get_double("run", "initial_width_um", r.initial_width);
  r.initial_amplitude =
      cfg.get_double("run", "initial_amplitude", r.initial_amplitude);
  r.noise_amplitude =
      cfg.get_double("run", "noise_amplitude", r.noise_amplitude);
  r.seed = static_cast<unsigned long long>(cfg.get_int("run", "seed", 0));
  r.watchdog_max_abs =
      cfg.get_double("run", "watchdog_max_abs", r.watchdog_max_abs);
  r.local_substeps = cfg.get_int("run", "local_substeps", r.local_substeps);
  r.splitting = cfg.get_enum("run", "splitting", {"lkl", "klk"}, r.splitting);
  if (!(r.dt > 0.0)) throw ConfigError("run.dt_ps", "must be > 0");
  if (!(r.t_final > 0.0)) throw ConfigError("run.t_final_ps", "must be > 0");
  if (r.observer_stride < 0)
    throw ConfigError("run.observer_stride", "must be >= 0");
  if (r.snapshot_stride < 0)
    throw ConfigError("run.snapshot_stride", "must be >= 0");
  if (r.local_substeps < 1)
    throw ConfigError("run.local_substeps", "must be >= 1");
  if (!(r.initial_width > 0.0))
    throw ConfigError("run.initial_width_um", "must be > 0");
  return r;
}

}  // namespace pfqm
