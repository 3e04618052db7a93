#include <doctest.h>

#include <cmath>

#include "pfqm/observables.hpp"

using namespace pfqm;

namespace {

SpectralField ring_field(const Grid& g, double r0, double w) {
  SpectralField f = SpectralField::zeros(g);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double r = std::hypot(g.x(ix), g.y(iy));
      f.values[static_cast<size_t>(iy) * g.nx + ix] =
          std::exp(-(r - r0) * (r - r0) / (2.0 * w * w));
    }
  return f;
}

}  // namespace

TEST_CASE("total mass") {
  const Grid g = Grid::make_2d(64, 64, 12.0, 12.0);

  SUBCASE("zero field") {
    CHECK(total_mass(SpectralField::zeros(g)) == 0.0);
  }

  SUBCASE("unit constant over the area") {
    SpectralField f = SpectralField::zeros(g);
    for (auto& v : f.values) v = 1.0;
    CHECK(total_mass(f) == doctest::Approx(12.0 * 12.0).epsilon(1e-14));
  }

  SUBCASE("resolved gaussian matches the closed-form integral") {
    const Grid gg = Grid::make_2d(256, 256, 40.0, 40.0);
    SpectralField f = SpectralField::zeros(gg);
    const double s = 2.0;
    for (int iy = 0; iy < gg.ny; ++iy)
      for (int ix = 0; ix < gg.nx; ++ix) {
        const double r2 = gg.x(ix) * gg.x(ix) + gg.y(iy) * gg.y(iy);
        f.values[static_cast<size_t>(iy) * gg.nx + ix] =
            std::exp(-r2 / (2.0 * s * s));
      }
    // integral of exp(-r^2/s^2) over the plane = pi s^2
    CHECK(total_mass(f) ==
          doctest::Approx(M_PI * s * s).epsilon(1e-10));
  }

  SUBCASE("invariant under lattice translation") {
    SpectralField f = ring_field(g, 3.0, 0.8);
    SpectralField shifted = f;
    const int by = 17;
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix)
        shifted.values[static_cast<size_t>(iy) * g.nx + (ix + by) % g.nx] =
            f.values[static_cast<size_t>(iy) * g.nx + ix];
    CHECK(total_mass(shifted) == doctest::Approx(total_mass(f)).epsilon(1e-14));
  }
}

TEST_CASE("density and phase maps") {
  const Grid g = Grid::make_1d(64, 16.0);

  SUBCASE("constant phase") {
    SpectralField f = SpectralField::zeros(g);
    for (auto& v : f.values) v = std::polar(2.0, M_PI / 4.0);
    const DensityPhase dp = density_phase(f);
    for (int i = 0; i < g.nx; ++i) {
      CHECK(dp.density[i] == doctest::Approx(4.0));
      CHECK(dp.phase[i] == doctest::Approx(M_PI / 4.0));
      CHECK(dp.phase_defined[i] == 1);
    }
  }

  SUBCASE("plane wave winds linearly at constant density") {
    SpectralField f = SpectralField::zeros(g);
    const double k = g.kx(3);
    for (int i = 0; i < g.nx; ++i) f.values[i] = std::polar(1.0, k * g.x(i));
    const DensityPhase dp = density_phase(f);
    for (int i = 0; i < g.nx; ++i) {
      CHECK(dp.density[i] == doctest::Approx(1.0));
      double expect = std::remainder(k * g.x(i), 2.0 * M_PI);
      if (expect <= -M_PI) expect = M_PI;
      CHECK(std::abs(std::remainder(dp.phase[i] - expect, 2.0 * M_PI)) < 1e-12);
    }
  }

  SUBCASE("near-zero density is flagged undefined") {
    SpectralField f = SpectralField::zeros(g);
    f.values[0] = 1.0;
    f.values[1] = 1e-9;  // |.|^2 = 1e-18 < 1e-12 * max
    const DensityPhase dp = density_phase(f);
    CHECK(dp.phase_defined[0] == 1);
    CHECK(dp.phase_defined[1] == 0);
    for (int i = 0; i < g.nx; ++i) CHECK(dp.density[i] >= 0.0);
  }
}

TEST_CASE("radial profile") {
  const Grid g = Grid::make_2d(128, 128, 25.0, 25.0);

  SUBCASE("constant density is flat") {
    std::vector<double> dens(g.size(), 0.7);
    const RadialProfile prof = radial_profile(dens, g, 0.0, 0.0, 16);
    for (size_t i = 0; i < prof.radii.size(); ++i) {
      CHECK(prof.counts[i] > 0);
      CHECK(prof.mean_density[i] == doctest::Approx(0.7));
    }
  }

  SUBCASE("ring density peaks in the right bin") {
    const SpectralField f = ring_field(g, 5.0, 1.0);
    const DensityPhase dp = density_phase(f);
    const RadialProfile prof = radial_profile(dp.density, g, 0.0, 0.0, 32);
    size_t peak = 0;
    for (size_t i = 1; i < prof.mean_density.size(); ++i)
      if (prof.mean_density[i] > prof.mean_density[peak]) peak = i;
    const double bin_w = prof.radii[1] - prof.radii[0];
    CHECK(std::abs(prof.radii[peak] - 5.0) <= bin_w);
  }

  SUBCASE("bin-mass consistency within 2%") {
    const SpectralField f = ring_field(g, 4.0, 1.5);
    const DensityPhase dp = density_phase(f);
    const int nb = 32;
    const RadialProfile prof = radial_profile(dp.density, g, 0.0, 0.0, nb);
    const double rmax = 12.5;
    double binned = 0.0;
    for (int b = 0; b < nb; ++b) {
      const double r_in = b * rmax / nb, r_out = (b + 1) * rmax / nb;
      binned += prof.mean_density[b] * M_PI * (r_out * r_out - r_in * r_in);
    }
    double direct = 0.0;
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix)
        if (std::hypot(g.x(ix), g.y(iy)) < rmax)
          direct += dp.density[static_cast<size_t>(iy) * g.nx + ix] * g.cell();
    CHECK(std::abs(binned - direct) / direct < 0.02);
  }

  SUBCASE("sparse grids report empty bins with count zero") {
    const Grid tiny = Grid::make_2d(8, 8, 8.0, 8.0);
    std::vector<double> dens(tiny.size(), 1.0);
    const RadialProfile prof = radial_profile(dens, tiny, 0.0, 0.0, 32);
    bool saw_empty = false;
    for (size_t i = 0; i < prof.counts.size(); ++i)
      if (prof.counts[i] == 0) {
        saw_empty = true;
        CHECK(prof.mean_density[i] == 0.0);
      }
    CHECK(saw_empty);
  }

  SUBCASE("parameter validation") {
    std::vector<double> dens(g.size(), 1.0);
    CHECK_THROWS_AS(radial_profile(dens, g, 0.0, 0.0, 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(radial_profile(dens, g, 100.0, 0.0, 16),
                    std::invalid_argument);
  }
}

TEST_CASE("ring radius") {
  const Grid g = Grid::make_2d(256, 256, 25.0, 25.0);

  SUBCASE("synthetic ring at 5 um with 64 bins") {
    const SpectralField f = ring_field(g, 5.0, 1.0);
    const DensityPhase dp = density_phase(f);
    const RingRadius rr =
        ring_radius(radial_profile(dp.density, g, 0.0, 0.0, 64));
    CHECK(!rr.no_ring);
    CHECK(std::abs(rr.radius - 5.0) < 0.2);
  }

  SUBCASE("centered gaussian has no ring") {
    SpectralField f = SpectralField::zeros(g);
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const double r2 = g.x(ix) * g.x(ix) + g.y(iy) * g.y(iy);
        f.values[static_cast<size_t>(iy) * g.nx + ix] = std::exp(-r2);
      }
    const DensityPhase dp = density_phase(f);
    const RingRadius rr =
        ring_radius(radial_profile(dp.density, g, 0.0, 0.0, 64));
    CHECK(rr.no_ring);
    CHECK(rr.radius == 0.0);
  }

  SUBCASE("radius is monotone under an r0 sweep") {
    double prev = 0.0;
    for (const double r0 : {3.0, 4.5, 6.0, 7.5, 9.0}) {
      const SpectralField f = ring_field(g, r0, 1.0);
      const DensityPhase dp = density_phase(f);
      const RingRadius rr =
          ring_radius(radial_profile(dp.density, g, 0.0, 0.0, 64));
      CHECK(rr.radius > prev);
      prev = rr.radius;
    }
  }
}

TEST_CASE("second moment of a ring exceeds a blob's") {
  const Grid g = Grid::make_2d(128, 128, 25.0, 25.0);
  const SpectralField ring = ring_field(g, 6.0, 1.0);
  const SpectralField blob = ring_field(g, 0.0, 1.0);
  const DensityPhase dr = density_phase(ring);
  const DensityPhase db = density_phase(blob);
  CHECK(second_moment(dr.density, g, 0.0, 0.0) >
        second_moment(db.density, g, 0.0, 0.0));
}

TEST_CASE("time series validation and pure decay") {
  ModelParams p;
  p.gamma = 0.3;

  // M(t) = M0 exp(-gamma t) satisfies the balance law without pump or eta
  TimeSeries ts;
  const double m0 = 2.0, dt = 0.01;
  for (int i = 0; i <= 100; ++i) {
    ts.t.push_back(i * dt);
    ts.mass.push_back(m0 * std::exp(-p.gamma * i * dt));
    ts.max_abs.push_back(0.0);
    ts.kinetic_expectation.push_back(0.0);
    ts.pump_inner_real.push_back(0.0);
    ts.balance_residual.push_back(0.0);
  }
  ts.validate();
  for (size_t i = 1; i + 1 < ts.t.size(); ++i) {
    // centered difference of the exponential: residual O(dt^2) * gamma^3 M
    CHECK(mass_balance_residual(ts, p, i) < 2e-5);
  }

  TimeSeries bad = ts;
  bad.t[5] = bad.t[4];
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
