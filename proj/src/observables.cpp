#include "pfqm/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace pfqm {

double total_mass(const SpectralField& field) {
  double acc = 0.0;
  for (const auto& v : field.values) acc += std::norm(v);
  return acc * field.grid.cell();
}

DensityPhase density_phase(const SpectralField& field) {
  DensityPhase out;
  const size_t n = field.values.size();
  out.density.resize(n);
  out.phase.resize(n);
  out.phase_defined.assign(n, 1);
  double max_d = 0.0;
  for (size_t i = 0; i < n; ++i) {
    out.density[i] = std::norm(field.values[i]);
    max_d = std::max(max_d, out.density[i]);
  }
  const double floor = 1e-12 * max_d;
  for (size_t i = 0; i < n; ++i) {
    if (out.density[i] < floor) {
      out.phase_defined[i] = 0;
      out.phase[i] = 0.0;
      continue;
    }
    double ph = std::arg(field.values[i]);  // (-pi, pi]
    if (ph <= -M_PI) ph = M_PI;
    out.phase[i] = ph;
  }
  return out;
}

RadialProfile radial_profile(const std::vector<double>& density,
                             const Grid& grid, double center_x,
                             double center_y, int n_bins) {
  if (n_bins < 4)
    throw std::invalid_argument("radial_profile: n_bins must be >= 4");
  if (density.size() != static_cast<size_t>(grid.size()))
    throw std::invalid_argument("radial_profile: density size mismatch");
  const double half_x = 0.5 * grid.lx;
  const double half_y = grid.dim == 2 ? 0.5 * grid.ly : 0.0;
  if (std::abs(center_x) > half_x ||
      (grid.dim == 2 && std::abs(center_y) > half_y))
    throw std::invalid_argument("radial_profile: center outside the domain");

  const double r_max =
      grid.dim == 2 ? 0.5 * std::min(grid.lx, grid.ly) : 0.5 * grid.lx;
  RadialProfile prof;
  prof.radii.resize(n_bins);
  prof.mean_density.assign(n_bins, 0.0);
  prof.counts.assign(n_bins, 0);
  for (int b = 0; b < n_bins; ++b)
    prof.radii[b] = (b + 0.5) * r_max / n_bins;

  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double rx = grid.x(ix) - center_x;
      const double ry = grid.y(iy) - center_y;
      const double r = std::sqrt(rx * rx + ry * ry);
      if (r >= r_max) continue;
      const int b = std::min(static_cast<int>(r / r_max * n_bins), n_bins - 1);
      prof.mean_density[b] += density[static_cast<size_t>(iy) * grid.nx + ix];
      ++prof.counts[b];
    }
  for (int b = 0; b < n_bins; ++b)
    if (prof.counts[b] > 0) prof.mean_density[b] /= prof.counts[b];
  return prof;
}

RingRadius ring_radius(const RadialProfile& profile) {
  const auto& y = profile.mean_density;
  if (y.size() < 3)
    throw std::invalid_argument("ring_radius: profile too short");
  size_t peak = 0;
  for (size_t i = 1; i < y.size(); ++i)
    if (y[i] > y[peak]) peak = i;
  if (peak == 0) return {0.0, true};
  if (peak == y.size() - 1) return {profile.radii[peak], false};
  const double y0 = y[peak - 1], y1 = y[peak], y2 = y[peak + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  const double offset = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
  const double dr = profile.radii[1] - profile.radii[0];
  return {profile.radii[peak] + offset * dr, false};
}

double second_moment(const std::vector<double>& density, const Grid& grid,
                     double center_x, double center_y) {
  double m = 0.0, mr2 = 0.0;
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double d = density[static_cast<size_t>(iy) * grid.nx + ix];
      const double rx = grid.x(ix) - center_x;
      const double ry = grid.y(iy) - center_y;
      m += d;
      mr2 += d * (rx * rx + ry * ry);
    }
  return m > 0.0 ? mr2 / m : 0.0;
}

double mass_balance_rhs(const ObserverSample& s, const ModelParams& params) {
  return -(2.0 * params.eta / hbar) * s.kinetic_expectation +
         (2.0 / hbar) * s.pump_inner_real - params.gamma * s.mass;
}

TimeSeries TimeSeries::from_samples(const std::vector<ObserverSample>& samples,
                                    const ModelParams& params) {
  TimeSeries ts;
  const size_t n = samples.size();
  ts.t.resize(n);
  ts.mass.resize(n);
  ts.max_abs.resize(n);
  ts.kinetic_expectation.resize(n);
  ts.pump_inner_real.resize(n);
  ts.balance_residual.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 0; i < n; ++i) {
    ts.t[i] = samples[i].t;
    ts.mass[i] = samples[i].mass;
    ts.max_abs[i] = samples[i].max_abs;
    ts.kinetic_expectation[i] = samples[i].kinetic_expectation;
    ts.pump_inner_real[i] = samples[i].pump_inner_real;
  }
  for (size_t i = 1; i + 1 < n; ++i)
    ts.balance_residual[i] = mass_balance_residual(ts, params, i);
  return ts;
}

void TimeSeries::validate() const {
  const size_t n = t.size();
  if (mass.size() != n || max_abs.size() != n ||
      kinetic_expectation.size() != n || pump_inner_real.size() != n ||
      balance_residual.size() != n)
    throw std::invalid_argument("TimeSeries: channel lengths differ");
  for (size_t i = 1; i < n; ++i)
    if (!(t[i] > t[i - 1]))
      throw std::invalid_argument("TimeSeries: times must strictly increase");
}

double mass_balance_residual(const TimeSeries& ts, const ModelParams& params,
                             size_t i) {
  if (i == 0 || i + 1 >= ts.t.size())
    throw std::invalid_argument("mass_balance_residual: interior samples only");
  const double dmdt =
      (ts.mass[i + 1] - ts.mass[i - 1]) / (ts.t[i + 1] - ts.t[i - 1]);
  ObserverSample s;
  s.mass = ts.mass[i];
  s.kinetic_expectation = ts.kinetic_expectation[i];
  s.pump_inner_real = ts.pump_inner_real[i];
  return std::abs(dmdt - mass_balance_rhs(s, params));
}

void write_time_series_csv(const TimeSeries& ts, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f,
               "t_ps,mass,max_abs,kinetic_expectation_mev,pump_inner_real,"
               "balance_residual\n");
  for (size_t i = 0; i < ts.t.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", ts.t[i],
                 ts.mass[i], ts.max_abs[i], ts.kinetic_expectation[i],
                 ts.pump_inner_real[i], ts.balance_residual[i]);
  std::fclose(f);
}

void write_radial_profile_csv(const RadialProfile& profile,
                              const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "r_um,mean_density,count\n");
  for (size_t i = 0; i < profile.radii.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%ld\n", profile.radii[i],
                 profile.mean_density[i], profile.counts[i]);
  std::fclose(f);
}

}  // namespace pfqm
