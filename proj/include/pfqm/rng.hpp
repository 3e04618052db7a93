#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace pfqm {

// Deterministic helper around mt19937_64. Distributions are spelled out
// explicitly because the standard library ones are implementation-defined,
// and identical seeds must give identical fields everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gauss() {
    // Box-Muller; discards the second deviate for simplicity
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * M_PI * u2);
  }

  std::complex<double> cgauss() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace pfqm
