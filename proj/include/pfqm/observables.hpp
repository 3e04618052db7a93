#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pfqm/dynamics.hpp"
#include "pfqm/spectral.hpp"

namespace pfqm {

// Total mass M = sum |psi|^2 * cell (squared L2 norm).
double total_mass(const SpectralField& field);

struct DensityPhase {
  std::vector<double> density;  // |psi|^2
  std::vector<double> phase;    // arg psi in (-pi, pi]
  std::vector<unsigned char> phase_defined;  // 0 where |psi|^2 < 1e-12 * max
};
DensityPhase density_phase(const SpectralField& field);

struct RadialProfile {
  std::vector<double> radii;         // bin centers, um
  std::vector<double> mean_density;  // per bin
  std::vector<long> counts;
};

// Equal-width annular bins from `center` out to min(lx, ly)/2.
// Throws std::invalid_argument for n_bins < 4 or a center outside the domain.
RadialProfile radial_profile(const std::vector<double>& density,
                             const Grid& grid, double center_x,
                             double center_y, int n_bins);

struct RingRadius {
  double radius = 0.0;  // um
  bool no_ring = false;  // maximum sat in the innermost bin
};

// Peak of the radial profile with parabolic sub-bin interpolation.
RingRadius ring_radius(const RadialProfile& profile);

// Second moment <r^2> of a density map about a center (contraction measure).
double second_moment(const std::vector<double>& density, const Grid& grid,
                     double center_x, double center_y);

// Recorded observables of a run, one row per observer sample. The balance
// residual compares the centered numerical dM/dt against
//   -(2 eta/hbar) <psi, K psi> + (2/hbar) Re<psi, P> - gamma M,
// which is what the equation of motion implies for the mass; it is defined
// on interior samples only.
struct TimeSeries {
  std::vector<double> t;
  std::vector<double> mass;
  std::vector<double> max_abs;
  std::vector<double> kinetic_expectation;
  std::vector<double> pump_inner_real;
  std::vector<double> balance_residual;  // NaN at the two endpoints

  static TimeSeries from_samples(const std::vector<ObserverSample>& samples,
                                 const ModelParams& params);
  void validate() const;
};

// Analytic mass-balance right-hand side at one sample.
double mass_balance_rhs(const ObserverSample& s, const ModelParams& params);

// |centered dM/dt - analytic RHS| at interior sample i of the series.
double mass_balance_residual(const TimeSeries& ts, const ModelParams& params,
                             size_t i);

void write_time_series_csv(const TimeSeries& ts, const std::string& path);
void write_radial_profile_csv(const RadialProfile& profile,
                              const std::string& path);

}  // namespace pfqm
