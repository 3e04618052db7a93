#include "pfqm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <semaphore>

#include "pfqm/analytic.hpp"
#include "pfqm/io.hpp"
#include "pfqm/rng.hpp"

namespace fs = std::filesystem;

namespace pfqm {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << text;
}

void echo_config(const ConfigReader& cfg, const std::string& out_dir) {
  write_text(out_dir + "/effective.ini", cfg.effective_ini());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// first sign change of the lower-branch curvature scanned on [0, k_max]
std::optional<double> scan_inflection(const CavityParams& p, double k_max) {
  const int n = 2000;
  double prev = lower_branch_curvature(k_max * 1e-6, p);
  for (int i = 1; i <= n; ++i) {
    const double k = k_max * i / n;
    const double cur = lower_branch_curvature(k, p);
    if (prev == 0.0) return k_max * (i - 1) / n;
    if (prev * cur < 0.0)
      return find_inflection(p, k_max * (i - 1) / n, k);
    prev = cur;
  }
  return std::nullopt;
}

}  // namespace

void cmd_dispersion(const IniDoc& doc, const std::string& out_dir) {
  ConfigReader cfg(doc);
  const CavityParams cavity = load_cavity(cfg);
  const double k_max = cfg.get_double("dispersion", "k_max_per_um", 5.0);
  const long samples = cfg.get_int("dispersion", "samples", 500);
  const double s = cfg.get_double("dispersion", "fractional_s", 5.0 / 6.0);
  if (samples < 2) throw ConfigError("dispersion.samples", "must be >= 2");
  if (!(k_max > 0.0)) throw ConfigError("dispersion.k_max_per_um", "must be > 0");
  if (!(s > 0.0 && s <= 1.0))
    throw ConfigError("dispersion.fractional_s", "must be in (0, 1]");
  cfg.reject_unknown();
  ensure_dir(out_dir);
  echo_config(cfg, out_dir);

  const KineticSpec curv = curvature_spec(cavity);
  const KineticSpec cm = constant_mass_spec(branch_bottom_mass(cavity));
  const double c_s = fit_fractional_coefficient(cavity, s, 0.5, 50, true);
  const KineticSpec frac = fractional_spec(s, c_s);

  std::string csv =
      "k_per_um,e_l_mev,e_u_mev,e_c_mev,e_x_mev,g_curvature_mev,"
      "g_constmass_mev,g_fractional_mev,inv_mass_hbar2\n";
  for (long i = 0; i < samples; ++i) {
    const double k = k_max * i / (samples - 1);
    const auto [el, eu] = branch_energies(k, cavity);
    csv += fmt(k) + "," + fmt(el) + "," + fmt(eu) + "," +
           fmt(cavity_energy(k, cavity)) + "," +
           fmt(exciton_energy(k, cavity)) + "," +
           fmt(kinetic_prefactor_g(k, curv)) + "," +
           fmt(kinetic_prefactor_g(k, cm)) + "," +
           fmt(kinetic_prefactor_g(k, frac)) + "," +
           fmt(inverse_effective_mass(k, cavity)) + "\n";
  }
  write_text(out_dir + "/dispersion.csv", csv);

  std::string summary;
  const auto kinf = scan_inflection(cavity, k_max);
  summary += "k_inf_per_um = " + (kinf ? fmt(*kinf) : "none") + "\n";
  summary += "fractional_s = " + fmt(s) + "\n";
  summary += "fractional_coefficient_mev_um2s = " + fmt(c_s) + "\n";
  summary +=
      "bottom_mass_me = " + fmt(branch_bottom_mass(cavity) * hbar2_over_me) +
      "\n";
  write_text(out_dir + "/summary.txt", summary);
}

AssembledRun assemble_run(ConfigReader& cfg) {
  AssembledRun r;
  r.grid = load_grid(cfg);
  r.cavity = load_cavity(cfg);
  r.params = load_model(cfg, r.cavity, r.grid.dim);
  r.run = load_run(cfg);
  return r;
}

SpectralField initial_field(const Grid& grid, const RunConfig& run) {
  SpectralField f = SpectralField::zeros(grid);
  if (run.initial == "gaussian") {
    const double w2 = run.initial_width * run.initial_width;
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int ix = 0; ix < grid.nx; ++ix) {
        const double x = grid.x(ix), y = grid.y(iy);
        f.values[static_cast<size_t>(iy) * grid.nx + ix] =
            run.initial_amplitude * std::exp(-(x * x + y * y) / w2);
      }
  } else if (run.initial == "noise") {
    Rng rng(run.seed);
    for (auto& v : f.values) v = run.noise_amplitude * rng.cgauss();
  }
  return f;
}

namespace {

struct PointResult {
  EvolveOutputs out;
  std::string error;  // nonempty on failure
};

EvolveOutputs run_one(const AssembledRun& setup, const std::string& out_dir,
                      double sweep_value) {
  ensure_dir(out_dir);
  SimState state{initial_field(setup.grid, setup.run), 0.0};

  EvolveOptions opt;
  opt.split = setup.run.splitting == "klk" ? SplitOrder::kinetic_local_kinetic
                                           : SplitOrder::local_kinetic_local;
  opt.local_substeps = static_cast<int>(setup.run.local_substeps);
  opt.watchdog_max_abs = setup.run.watchdog_max_abs;

  // snapshots have their own cadence, so drive the stepping loop directly
  const long snapshot_stride = setup.run.snapshot_stride;
  long step_counter = 0;
  std::vector<ObserverSample> samples;
  const long nsteps = std::lround(setup.run.t_final / setup.run.dt);
  Evolver ev(setup.grid, setup.params, setup.run.dt, opt);
  auto snap_path = [&](long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%08ld.pfqm", step);
    return out_dir + "/" + buf;
  };
  samples.push_back(ev.sample(state));
  if (snapshot_stride > 0) write_snapshot(state, snap_path(0));
  for (long i = 1; i <= nsteps; ++i) {
    ev.step(state);
    if ((setup.run.observer_stride > 0 && i % setup.run.observer_stride == 0) ||
        i == nsteps)
      samples.push_back(ev.sample(state));
    if (snapshot_stride > 0 && (i % snapshot_stride == 0 || i == nsteps))
      write_snapshot(state, snap_path(i));
  }
  step_counter = nsteps;

  const TimeSeries ts = TimeSeries::from_samples(samples, setup.params);
  write_time_series_csv(ts, out_dir + "/series.csv");
  write_snapshot(state, out_dir + "/final.pfqm");

  EvolveOutputs out;
  out.sweep_value = sweep_value;
  out.omega_i = setup.params.pump.omega_i;
  out.mass_final = samples.back().mass;
  out.max_abs_final = samples.back().max_abs;
  out.ring_radius = nan;
  out.no_ring = false;
  out.second_moment = nan;

  std::string summary;
  summary += "steps = " + std::to_string(step_counter) + "\n";
  summary += "mass_final = " + fmt(out.mass_final) + "\n";
  summary += "max_abs_final = " + fmt(out.max_abs_final) + "\n";
  if (setup.grid.dim == 2) {
    const DensityPhase dp = density_phase(state.field);
    const RadialProfile prof =
        radial_profile(dp.density, setup.grid, 0.0, 0.0, 64);
    write_radial_profile_csv(prof, out_dir + "/radial_profile.csv");
    const RingRadius ring = ring_radius(prof);
    out.ring_radius = ring.radius;
    out.no_ring = ring.no_ring;
    out.second_moment = second_moment(dp.density, setup.grid, 0.0, 0.0);
    summary += "ring_radius_um = " + fmt(out.ring_radius) + "\n";
    summary += std::string("no_ring = ") + (ring.no_ring ? "true" : "false") +
               "\n";
    summary += "second_moment_um2 = " + fmt(out.second_moment) + "\n";
  }
  write_text(out_dir + "/summary.txt", summary);
  return out;
}

}  // namespace

std::vector<EvolveOutputs> cmd_evolve(
    const IniDoc& doc, const std::string& out_dir, int threads,
    std::optional<unsigned long long> seed_override) {
  ConfigReader cfg(doc);
  AssembledRun setup = assemble_run(cfg);
  if (seed_override) setup.run.seed = *seed_override;

  const bool final_csv = cfg.get_bool("output", "final_field_csv", false);

  std::vector<double> sweep_values;
  std::string omega_mode = "fixed";
  double omega_offset = 0.0;
  const bool sweeping = cfg.has_section("sweep");
  if (sweeping) {
    sweep_values = cfg.get_double_list("sweep", "values");
    omega_mode = cfg.get_enum(
        "sweep", "omega_i_mode",
        {"fixed", "follow_curvature", "follow_constant_mass"},
        "follow_curvature");
    omega_offset = cfg.get_double("sweep", "omega_i_offset_mev", 0.0);
    if (setup.grid.dim != 2)
      throw ConfigError("sweep", "pump wavevector sweeps need dim = 2");
    if (setup.params.pump.is_none())
      throw ConfigError("sweep", "sweeps need a pump");
  }
  cfg.reject_unknown();
  ensure_dir(out_dir);
  echo_config(cfg, out_dir);

  std::vector<EvolveOutputs> results;
  if (!sweeping) {
    results.push_back(run_one(setup, out_dir, nan));
    if (final_csv) {
      const SimState final_state = read_snapshot(out_dir + "/final.pfqm");
      write_field_csv(final_state.field, out_dir + "/final_field.csv");
    }
    return results;
  }

  // sweep over k_i = (a/sqrt2)(1,1)
  const bool half = setup.params.kinetic.prefactor_half;
  const KineticSpec curv = curvature_spec(setup.cavity, half);
  const KineticSpec cm =
      constant_mass_spec(branch_bottom_mass(setup.cavity), half);

  std::vector<AssembledRun> setups;
  std::vector<std::string> dirs;
  for (const double a : sweep_values) {
    AssembledRun point = setup;
    point.params.pump.k_i_x = a / std::sqrt(2.0);
    point.params.pump.k_i_y = a / std::sqrt(2.0);
    if (omega_mode == "follow_curvature")
      point.params.pump.omega_i =
          kinetic_prefactor_g(a, curv) + omega_offset;
    else if (omega_mode == "follow_constant_mass")
      point.params.pump.omega_i = kinetic_prefactor_g(a, cm) + omega_offset;
    char buf[32];
    std::snprintf(buf, sizeof buf, "a_%g", a);
    setups.push_back(point);
    dirs.push_back(out_dir + "/" + buf);
  }

  results.resize(setups.size());
  std::vector<std::string> errors(setups.size());
  std::counting_semaphore<256> slots(std::max(1, threads));
  std::vector<std::future<void>> futures;
  for (size_t i = 0; i < setups.size(); ++i) {
    futures.push_back(std::async(std::launch::async, [&, i] {
      slots.acquire();
      try {
        results[i] = run_one(setups[i], dirs[i], sweep_values[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      slots.release();
    }));
  }
  for (auto& f : futures) f.get();
  for (size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      throw evolve_error("sweep point a = " + fmt(sweep_values[i]) +
                             " failed: " + errors[i],
                         nan, nan, -1);

  std::string csv =
      "a_per_um,omega_i_mev,mass_final,ring_radius_um,no_ring,"
      "second_moment_um2\n";
  for (const auto& r : results)
    csv += fmt(r.sweep_value) + "," + fmt(r.omega_i) + "," +
           fmt(r.mass_final) + "," + fmt(r.ring_radius) + "," +
           (r.no_ring ? "1" : "0") + "," + fmt(r.second_moment) + "\n";
  write_text(out_dir + "/sweep_summary.csv", csv);
  return results;
}

void cmd_planewave(const IniDoc& doc, const std::string& out_dir) {
  ConfigReader cfg(doc);
  const CavityParams cavity = load_cavity(cfg);
  const bool half = cfg.get_bool("kinetic", "prefactor_half", true);
  const double alpha = cfg.get_double("model", "alpha_mev_um");
  const double gamma = cfg.get_double("model", "gamma_per_ps");
  const double omega = cfg.get_double("model", "omega_mev", 0.0);
  const std::string profile =
      cfg.get_enum("pump", "profile", {"homogeneous"}, "homogeneous");
  (void)profile;
  const double kappa = cfg.get_double("pump", "k_i_x_per_um");
  const double omega_i = cfg.get_double("pump", "omega_i_mev");
  const double p0_max = cfg.get_double("pump", "amplitude_mev");
  const long n = cfg.get_int("planewave", "p0_samples", 200);
  if (n < 2) throw ConfigError("planewave.p0_samples", "must be >= 2");
  if (!(p0_max > 0.0)) throw ConfigError("pump.amplitude_mev", "must be > 0");
  cfg.reject_unknown();
  ensure_dir(out_dir);
  echo_config(cfg, out_dir);

  const KineticSpec curv = curvature_spec(cavity, half);
  const KineticSpec cm = constant_mass_spec(branch_bottom_mass(cavity), half);

  PlaneWaveProblem base;
  base.kappa_i = kappa;
  base.omega_i = omega_i;
  base.alpha = alpha;
  base.gamma = gamma;
  base.omega = omega;

  std::vector<double> grid(n);
  for (long i = 0; i < n; ++i) grid[i] = p0_max * (i + 1) / n;

  PlaneWaveProblem prob_curv = base;
  prob_curv.g_at_kappa = kinetic_prefactor_g(kappa, curv);
  PlaneWaveProblem prob_cm = base;
  prob_cm.g_at_kappa = kinetic_prefactor_g(kappa, cm);
  const BranchCurve curve_curv = physical_branch(prob_curv, grid);
  const BranchCurve curve_cm = physical_branch(prob_cm, grid);

  std::string csv =
      "p0_mev,rho_curvature,psi_re_curvature,psi_im_curvature,"
      "n_roots_curvature,rho_constmass,psi_re_constmass,psi_im_constmass,"
      "n_roots_constmass\n";
  for (long i = 0; i < n; ++i) {
    PlaneWaveProblem pc = prob_curv;
    pc.pump = grid[i];
    PlaneWaveProblem pm = prob_cm;
    pm.pump = grid[i];
    const auto psi_c = plane_wave_state(pc, curve_curv.points[i].rho);
    const auto psi_m = plane_wave_state(pm, curve_cm.points[i].rho);
    csv += fmt(grid[i]) + "," + fmt(curve_curv.points[i].rho) + "," +
           fmt(psi_c.real()) + "," + fmt(psi_c.imag()) + "," +
           std::to_string(curve_curv.points[i].n_roots) + "," +
           fmt(curve_cm.points[i].rho) + "," + fmt(psi_m.real()) + "," +
           fmt(psi_m.imag()) + "," +
           std::to_string(curve_cm.points[i].n_roots) + "\n";
  }
  write_text(out_dir + "/branch.csv", csv);

  auto describe = [&](const char* name, const PlaneWaveProblem& p,
                      const BranchCurve& c) {
    std::string s;
    s += std::string(name) + "_g_at_kappa_mev = " + fmt(p.g_at_kappa) + "\n";
    s += std::string(name) + "_fold_p0 = " +
         (c.fold_pump ? fmt(*c.fold_pump) : "none") + "\n";
    s += std::string(name) + "_bistable_ranges = ";
    if (c.bistable_ranges.empty()) s += "none";
    for (const auto& [lo, hi] : c.bistable_ranges)
      s += "[" + fmt(grid[lo]) + ", " + fmt(grid[hi]) + "] ";
    s += "\n";
    return s;
  };
  write_text(out_dir + "/summary.txt",
             describe("curvature", prob_curv, curve_curv) +
                 describe("constmass", prob_cm, curve_cm));
}

void cmd_response(const IniDoc& doc, const std::string& out_dir) {
  ConfigReader cfg(doc);
  const Grid grid = load_grid(cfg);
  if (grid.dim != 2) throw ConfigError("grid.dim", "response maps need dim = 2");
  const CavityParams cavity = load_cavity(cfg);
  ResponseQuery q;
  q.mu = cfg.get_double("response", "mu_mev");
  q.gamma = cfg.get_double("response", "gamma_per_ps");
  q.pump_tilde = {cfg.get_double("response", "p_tilde_re", 1.0),
                  cfg.get_double("response", "p_tilde_im", 0.0)};
  q.v_x = cfg.get_double("response", "v_x_um_per_ps", 0.0);
  q.v_y = cfg.get_double("response", "v_y_um_per_ps", 0.0);
  const bool half = cfg.get_bool("response", "prefactor_half", true);
  cfg.reject_unknown();
  ensure_dir(out_dir);
  echo_config(cfg, out_dir);

  ResponseQuery q_curv = q;
  q_curv.kinetic = curvature_spec(cavity, half);
  ResponseQuery q_cm = q;
  q_cm.kinetic = constant_mass_spec(branch_bottom_mass(cavity), half);

  const ResponseMap map_curv = response_map(grid, q_curv);
  const ResponseMap map_cm = response_map(grid, q_cm);

  auto write_map = [&](const ResponseMap& m, const std::string& path) {
    std::string csv = "kx_per_um,ky_per_um,magnitude,masked\n";
    // fftshifted row order for direct plotting
    for (int sy = 0; sy < grid.ny; ++sy) {
      const int iy = (sy + grid.ny / 2) % grid.ny;
      for (int sx = 0; sx < grid.nx; ++sx) {
        const int ix = (sx + grid.nx / 2) % grid.nx;
        const size_t idx = static_cast<size_t>(iy) * grid.nx + ix;
        csv += fmt(grid.kx(ix)) + "," + fmt(grid.ky(iy)) + "," +
               fmt(m.magnitude[idx]) + "," +
               std::to_string(static_cast<int>(m.masked[idx])) + "\n";
      }
    }
    write_text(path, csv);
  };
  write_map(map_curv, out_dir + "/response_curvature.csv");
  write_map(map_cm, out_dir + "/response_constmass.csv");

  double d2 = 0.0, n2 = 0.0;
  for (size_t i = 0; i < map_curv.magnitude.size(); ++i) {
    const double d = map_curv.magnitude[i] - map_cm.magnitude[i];
    d2 += d * d;
    n2 += std::max(map_curv.magnitude[i] * map_curv.magnitude[i],
                   map_cm.magnitude[i] * map_cm.magnitude[i]);
  }
  std::string summary;
  summary += "masked_curvature = " + std::to_string(map_curv.n_masked) + "\n";
  summary += "masked_constmass = " + std::to_string(map_cm.n_masked) + "\n";
  summary += "relative_l2_difference = " + fmt(std::sqrt(d2 / n2)) + "\n";
  write_text(out_dir + "/summary.txt", summary);
}

// ---- selftest ---------------------------------------------------------

namespace {

struct Check {
  bool pass;
  std::string line;
};

Check check(bool pass, const std::string& what, double measured,
            const std::string& bound) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", measured);
  return {pass, std::string(pass ? "[PASS] " : "[FAIL] ") + what + " (" + buf +
                    " " + bound + ")"};
}

SpectralField random_field(const Grid& g, Rng& rng) {
  SpectralField f = SpectralField::zeros(g);
  for (auto& v : f.values) v = rng.cgauss();
  return f;
}

double rel_diff(const SpectralField& a, const SpectralField& b) {
  double d2 = 0.0, n2 = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    d2 += std::norm(a.values[i] - b.values[i]);
    n2 += std::norm(b.values[i]);
  }
  return std::sqrt(d2 / n2);
}

ModelParams selftest_model(const Grid& grid) {
  ModelParams p;
  p.alpha = 0.1;
  p.gamma = 0.2;
  p.eta = 0.0;
  p.omega = 0.0;
  p.kinetic = constant_mass_spec(branch_bottom_mass(default_cavity()));
  p.pump.profile = HomogeneousPump{0.5};
  p.pump.k_i_x = 2.0 * 2.0 * M_PI / grid.lx;  // on-grid mode
  p.pump.omega_i = 0.3;
  return p;
}

SpectralField run_pumped(const Grid& grid, const ModelParams& p, double t_end,
                         double dt) {
  SimState state;
  state.field = SpectralField::zeros(grid);
  for (int ix = 0; ix < grid.nx; ++ix) {
    const double x = grid.x(ix);
    state.field.values[ix] = std::exp(-x * x / 4.0);
  }
  evolve(state, p, t_end, dt, 0);
  return state.field;
}

}  // namespace

int cmd_selftest(std::ostream& out) {
  std::vector<Check> checks;
  Rng rng(20240915);

  {  // transforms: round trip and Parseval, 1D and 2D
    const Grid g1 = Grid::make_1d(256, 40.0);
    const Grid g2 = Grid::make_2d(64, 64, 20.0, 20.0);
    double worst_rt = 0.0, worst_pv = 0.0;
    for (const Grid& g : {g1, g2}) {
      const SpectralField f = random_field(g, rng);
      const SpectralField hat = forward(f);
      worst_rt = std::max(worst_rt, rel_diff(inverse(hat), f));
      double sum_r = 0.0, sum_k = 0.0;
      for (const auto& v : f.values) sum_r += std::norm(v);
      for (const auto& v : hat.values) sum_k += std::norm(v);
      worst_pv = std::max(worst_pv,
                          std::abs(sum_r * g.size() - sum_k) / sum_k);
    }
    checks.push_back(check(worst_rt < 1e-13, "fft round trip", worst_rt,
                           "< 1e-13"));
    checks.push_back(
        check(worst_pv < 1e-12, "parseval identity", worst_pv, "< 1e-12"));
  }

  {  // plane waves are exact eigenfunctions of the multiplier
    const Grid g = Grid::make_1d(128, 30.0);
    SpectralField f = SpectralField::zeros(g);
    const double kj = g.kx(5);
    for (int ix = 0; ix < g.nx; ++ix)
      f.values[ix] = std::polar(1.0, kj * g.x(ix));
    const SpectralField out_f =
        apply_multiplier(f, [](double k) { return k * k; });
    double worst = 0.0;
    for (int ix = 0; ix < g.nx; ++ix)
      worst = std::max(worst,
                       std::abs(out_f.values[ix] - kj * kj * f.values[ix]) /
                           (kj * kj));
    checks.push_back(
        check(worst < 1e-12, "plane-wave eigenfunction", worst, "< 1e-12"));
  }

  {  // Strang splitting order on a pumped 1D run
    const Grid g = Grid::make_1d(64, 20.0);
    const ModelParams p = selftest_model(g);
    const double T = 0.5;
    const SpectralField ref = run_pumped(g, p, T, 1.25e-4);
    std::vector<double> errs;
    for (const double dt : {4e-3, 2e-3, 1e-3})
      errs.push_back(rel_diff(run_pumped(g, p, T, dt), ref));
    const double slope =
        0.5 * (std::log2(errs[0] / errs[1]) + std::log2(errs[1] / errs[2]));
    checks.push_back(check(slope > 1.9 && slope < 2.1, "strang order", slope,
                           "in [1.9, 2.1]"));
  }

  {  // cubic residuals + root count vs discriminant
    double worst = 0.0;
    bool counts_ok = true;
    for (int i = 0; i < 200; ++i) {
      PlaneWaveProblem prob;
      prob.omega_i = rng.uniform(-2.0, 2.0);
      prob.gamma = rng.uniform(0.02, 2.0) * 2.0 / hbar;  // b in [0.02, 2]
      prob.alpha = rng.uniform(0.05, 2.0) * (rng.uniform() < 0.5 ? -1 : 1);
      prob.pump = rng.uniform(0.0, 2.0);
      prob.g_at_kappa = 0.0;
      const auto roots = density_cubic_roots(prob);
      const double a = prob.a(), b = prob.b(), al = prob.alpha;
      for (const double r : roots) {
        const double lhs = ((a - al * r) * (a - al * r) + b * b) * r;
        const double scale = std::max({std::abs(lhs), prob.pump * prob.pump,
                                       1e-300});
        worst = std::max(worst,
                         std::abs(lhs - prob.pump * prob.pump) / scale);
      }
      if (roots.empty()) counts_ok = false;
    }
    checks.push_back(
        check(worst < 1e-10 && counts_ok, "cubic residuals", worst, "< 1e-10"));
  }

  {  // mass balance residual shrinks ~4x under dt halving
    const Grid g = Grid::make_1d(64, 20.0);
    const ModelParams p = selftest_model(g);
    auto max_residual = [&](double dt) {
      SimState state;
      state.field = SpectralField::zeros(g);
      for (int ix = 0; ix < g.nx; ++ix) {
        const double x = g.x(ix);
        state.field.values[ix] = std::exp(-x * x / 4.0);
      }
      const EvolveResult res = evolve(state, p, 1.0, dt, 10);
      const TimeSeries ts = TimeSeries::from_samples(res.samples, p);
      double worst = 0.0;
      for (size_t i = 1; i + 1 < ts.t.size(); ++i)
        worst = std::max(worst, ts.balance_residual[i]);
      return worst;
    };
    const double r1 = max_residual(2e-3);
    const double r2 = max_residual(1e-3);
    const double factor = r1 / r2;
    checks.push_back(check(factor > 3.0, "mass balance dt-scaling", factor,
                           "> 3.0"));
  }

  int failures = 0;
  for (const auto& c : checks) {
    out << c.line << "\n";
    if (!c.pass) ++failures;
  }
  out << (failures == 0 ? "selftest: all checks passed"
                        : "selftest: " + std::to_string(failures) +
                              " check(s) failed")
      << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace pfqm
