#include <doctest.h>

#include <cmath>
#include <complex>

#include "pfqm/rng.hpp"
#include "pfqm/spectral.hpp"

using namespace pfqm;

namespace {

SpectralField random_smooth(const Grid& g, Rng& rng) {
  // random low-k content only, so the field is well resolved
  SpectralField hat = SpectralField::zeros(g, Space::reciprocal);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const double cutoff = 0.25 * g.kmax();
      if (g.kmag(ix, iy) <= cutoff)
        hat.values[static_cast<size_t>(iy) * g.nx + ix] = rng.cgauss();
    }
  return inverse(hat);
}

double rel_diff(const SpectralField& a, const SpectralField& b) {
  double d2 = 0.0, n2 = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    d2 += std::norm(a.values[i] - b.values[i]);
    n2 += std::norm(b.values[i]);
  }
  return std::sqrt(d2 / n2);
}

}  // namespace

TEST_CASE("grid wavenumbers and extents") {
  const Grid g = Grid::make_2d(16, 8, 32.0, 8.0);
  CHECK(g.dx() == doctest::Approx(2.0));
  CHECK(g.dx() * g.nx == doctest::Approx(g.lx));
  CHECK(g.kx(0) == 0.0);
  CHECK(g.kx(1) == doctest::Approx(2.0 * M_PI / 32.0));
  CHECK(g.kx(15) == doctest::Approx(-2.0 * M_PI / 32.0));
  CHECK(g.kx(8) == doctest::Approx(-8.0 * 2.0 * M_PI / 32.0));  // Nyquist
  CHECK(g.ky(4) == doctest::Approx(-4.0 * 2.0 * M_PI / 8.0));
  CHECK(g.kmax() ==
        doctest::Approx(std::hypot(8 * 2 * M_PI / 32.0, 4 * 2 * M_PI / 8.0)));

  CHECK_THROWS_AS(Grid::make_1d(7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make_1d(6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid::make_2d(16, 16, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("forward transform basics") {
  const Grid g = Grid::make_1d(32, 10.0);

  SUBCASE("constant field concentrates at k=0") {
    SpectralField f = SpectralField::zeros(g);
    const std::complex<double> c{0.7, -0.2};
    for (auto& v : f.values) v = c;
    const SpectralField hat = forward(f);
    CHECK(std::abs(hat.values[0] - c * double(g.nx)) < 1e-12 * g.nx);
    for (int i = 1; i < g.nx; ++i) CHECK(std::abs(hat.values[i]) < 1e-12 * g.nx);
  }

  SUBCASE("on-grid plane wave hits a single mode") {
    SpectralField f = SpectralField::zeros(g);
    const int j = 5;
    for (int i = 0; i < g.nx; ++i)
      f.values[i] = std::polar(1.0, g.kx(j) * g.x(i));
    const SpectralField hat = forward(f);
    for (int i = 0; i < g.nx; ++i) {
      if (i == j)
        CHECK(std::abs(hat.values[i]) == doctest::Approx(g.nx).epsilon(1e-12));
      else
        CHECK(std::abs(hat.values[i]) < 1e-10 * g.nx);
    }
  }

  SUBCASE("wrong space tag is rejected") {
    SpectralField f = SpectralField::zeros(g, Space::reciprocal);
    CHECK_THROWS_AS(forward(f), std::invalid_argument);
    SpectralField r = SpectralField::zeros(g, Space::real);
    CHECK_THROWS_AS(inverse(r), std::invalid_argument);
  }
}

TEST_CASE("inverse transform: delta, linearity, Parseval, round trip") {
  Rng rng(7);
  const Grid g1 = Grid::make_1d(256, 40.0);
  const Grid g2 = Grid::make_2d(64, 32, 20.0, 10.0);

  SUBCASE("delta at k=0 with amplitude N gives constant 1") {
    SpectralField hat = SpectralField::zeros(g1, Space::reciprocal);
    hat.values[0] = g1.nx;
    const SpectralField f = inverse(hat);
    for (const auto& v : f.values)
      CHECK(std::abs(v - 1.0) < 1e-13);
  }

  for (const Grid& g : {g1, g2}) {
    const SpectralField f = random_smooth(g, rng);

    // round trip
    CHECK(rel_diff(inverse(forward(f)), f) < 1e-13);

    // linearity on random pairs
    const SpectralField h = random_smooth(g, rng);
    SpectralField combo = f;
    const std::complex<double> a{0.3, 1.1}, b{-2.0, 0.4};
    for (size_t i = 0; i < combo.values.size(); ++i)
      combo.values[i] = a * f.values[i] + b * h.values[i];
    const SpectralField lhs = forward(combo);
    SpectralField rhs = forward(f);
    const SpectralField hh = forward(h);
    for (size_t i = 0; i < rhs.values.size(); ++i)
      rhs.values[i] = a * rhs.values[i] + b * hh.values[i];
    CHECK(rel_diff(lhs, rhs) < 1e-13);

    // Parseval under the stated normalization: N * sum|f|^2 = sum|fhat|^2
    const SpectralField hat = forward(f);
    double sr = 0.0, sk = 0.0;
    for (const auto& v : f.values) sr += std::norm(v);
    for (const auto& v : hat.values) sk += std::norm(v);
    CHECK(std::abs(sr * g.size() - sk) / sk < 1e-12);
  }
}

TEST_CASE("apply_multiplier") {
  Rng rng(21);
  const Grid g = Grid::make_1d(128, 25.0);

  SUBCASE("plane waves are exact eigenfunctions") {
    for (const int j : {1, 7, 40, 64 /* Nyquist */, 100}) {
      SpectralField f = SpectralField::zeros(g);
      for (int i = 0; i < g.nx; ++i)
        f.values[i] = std::polar(1.0, g.kx(j) * g.x(i));
      const SpectralField out =
          apply_multiplier(f, [](double k) { return 1.3 + k * k; });
      const double kj = std::abs(g.kx(j));
      const double expect = 1.3 + kj * kj;
      double worst = 0.0;
      for (int i = 0; i < g.nx; ++i)
        worst = std::max(worst,
                         std::abs(out.values[i] - expect * f.values[i]));
      CHECK(worst / expect < 1e-12);
    }
  }

  SUBCASE("identity multiplier is the identity") {
    const SpectralField f = random_smooth(g, rng);
    const SpectralField out = apply_multiplier(f, [](double) { return 1.0; });
    CHECK(rel_diff(out, f) < 1e-13);
  }

  SUBCASE("K = k^2 equals minus the spectral Laplacian") {
    // independent route: second derivative via two first-derivative passes
    // of the analytic plane-wave expansion, done directly on coefficients
    const SpectralField f = random_smooth(g, rng);
    const SpectralField lhs = apply_multiplier(f, [](double k) { return k * k; });
    SpectralField hat = forward(f);
    for (int i = 0; i < g.nx; ++i) {
      const std::complex<double> ik{0.0, g.kx(i)};
      hat.values[i] *= ik * ik;  // d^2/dx^2
    }
    SpectralField lap = inverse(hat);
    for (auto& v : lap.values) v = -v;
    CHECK(rel_diff(lhs, lap) < 1e-12);
  }

  SUBCASE("self-adjointness for real symbols") {
    const Grid g2 = Grid::make_2d(32, 32, 12.0, 12.0);
    const SpectralField f = random_smooth(g2, rng);
    const SpectralField h = random_smooth(g2, rng);
    auto K = [](double k) { return std::cos(k) + k; };
    const auto lhs = inner_product(f, apply_multiplier(h, K));
    const auto rhs = inner_product(apply_multiplier(f, K), h);
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-12);
  }

  SUBCASE("commutes with lattice translations") {
    const SpectralField f = random_smooth(g, rng);
    auto shift = [&](const SpectralField& in, int by) {
      SpectralField out = in;
      for (int i = 0; i < g.nx; ++i)
        out.values[(i + by) % g.nx] = in.values[i];
      return out;
    };
    auto K = [](double k) { return k * k / (1.0 + k); };
    const SpectralField a = shift(apply_multiplier(f, K), 13);
    const SpectralField b = apply_multiplier(shift(f, 13), K);
    CHECK(rel_diff(a, b) < 1e-12);
  }

  SUBCASE("non-finite symbol raises a domain error") {
    const SpectralField f = random_smooth(g, rng);
    CHECK_THROWS_AS(
        apply_multiplier(f, [](double k) { return 1.0 / k; }),  // inf at k=0
        std::domain_error);
  }
}

TEST_CASE("fractional laplacian") {
  Rng rng(3);
  const Grid g = Grid::make_1d(128, 25.0);

  SUBCASE("s = 1 and s = 1/2 on a plane wave") {
    const int j = 9;
    SpectralField f = SpectralField::zeros(g);
    for (int i = 0; i < g.nx; ++i)
      f.values[i] = std::polar(1.0, g.kx(j) * g.x(i));
    const double kj = g.kx(j);
    const SpectralField s1 = fractional_laplacian(f, 1.0);
    const SpectralField s05 = fractional_laplacian(f, 0.5);
    double w1 = 0.0, w05 = 0.0;
    for (int i = 0; i < g.nx; ++i) {
      w1 = std::max(w1, std::abs(s1.values[i] - kj * kj * f.values[i]));
      w05 = std::max(w05, std::abs(s05.values[i] - kj * f.values[i]));
    }
    CHECK(w1 / (kj * kj) < 1e-12);
    CHECK(w05 / kj < 1e-12);
  }

  SUBCASE("semigroup composition") {
    const SpectralField f = random_smooth(g, rng);
    const double s1 = 0.3, s2 = 0.45;
    const SpectralField composed =
        fractional_laplacian(fractional_laplacian(f, s1), s2);
    const SpectralField direct = fractional_laplacian(f, s1 + s2);
    CHECK(rel_diff(composed, direct) < 1e-10);
  }

  SUBCASE("s out of range") {
    const SpectralField f = random_smooth(g, rng);
    CHECK_THROWS_AS(fractional_laplacian(f, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fractional_laplacian(f, 1.2), std::invalid_argument);
  }
}
