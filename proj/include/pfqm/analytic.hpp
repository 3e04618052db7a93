#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "pfqm/dispersion.hpp"
#include "pfqm/spectral.hpp"

namespace pfqm {

// Homogeneous plane-wave problem psi(x,t) = psi0 exp(i kappa_i x - i omega_i
// t/hbar) with homogeneous pump of amplitude `pump` (hbar-scaled, meV units)
// and no potential. The stationary balance is
//   (a - alpha rho + i b) psi0 = i * pump,
// with a = omega_i - omega - g(kappa_i) and b = hbar*gamma/2, all in meV,
// so rho = |psi0|^2 solves the real cubic
//   ((a - alpha rho)^2 + b^2) rho = pump^2.
struct PlaneWaveProblem {
  double kappa_i = 0.0;   // 1/um
  double omega_i = 0.0;   // meV
  double pump = 0.0;      // P0, hbar-scaled
  double alpha = 0.0;     // meV um^d
  double gamma = 0.0;     // 1/ps
  double omega = 0.0;     // meV
  double g_at_kappa = 0.0;  // kinetic multiplier at kappa_i, meV

  double a() const { return omega_i - omega - g_at_kappa; }
  double b() const { return 0.5 * hbar * gamma; }
};

// All real nonnegative densities solving the cubic, ascending. alpha = 0
// degenerates to the single linear-response density. Every returned root is
// Newton-polished to a relative residual below 1e-12.
std::vector<double> density_cubic_roots(const PlaneWaveProblem& prob);

// Back-substituted amplitude psi0 = i*pump / (a - alpha rho + i b) for a root
// rho of the cubic. Throws std::domain_error when the denominator vanishes
// (degenerate root).
std::complex<double> plane_wave_state(const PlaneWaveProblem& prob, double rho);

struct BranchPoint {
  double pump = 0.0;
  double rho = 0.0;
  int n_roots = 1;  // real nonnegative roots at this pump
};

struct BranchCurve {
  std::vector<BranchPoint> points;
  // pump interval(s) with three coexisting roots, as [first, last] indices
  std::vector<std::pair<size_t, size_t>> bistable_ranges;
  // pump value where the followed branch disappeared (fold), if any
  std::optional<double> fold_pump;
};

// Continuation of the physical branch from rho = 0 along an ascending pump
// grid, always following the lowest density root. The bistable upper branch
// is reported through n_roots/bistable_ranges but never selected.
BranchCurve physical_branch(const PlaneWaveProblem& base,
                            std::span<const double> pump_grid);

// ---- linear response ------------------------------------------------------

// Query for the driven Bogoliubov response delta psi*_{-k}. Energies (mu and
// the kinetic multiplier) are meV and converted to rates by /hbar so they
// combine with gamma (1/ps) and k.v (1/ps).
struct ResponseQuery {
  double k_x = 0.0, k_y = 0.0;  // 1/um
  double v_x = 0.0, v_y = 0.0;  // um/ps
  double mu = 0.0;              // alpha*n, meV
  double gamma = 0.0;           // 1/ps
  std::complex<double> pump_tilde{0.0, 0.0};
  KineticSpec kinetic = constant_mass_spec(mass_from_electron_masses(1e-4));
};

class resonance_error : public std::domain_error {
 public:
  resonance_error(const std::string& msg, double k_x, double k_y)
      : std::domain_error(msg), k_x(k_x), k_y(k_y) {}
  double k_x, k_y;
};

// Closed form in rate units (g, mu in 1/ps, w = k.v in 1/ps):
//   (P mu + conj(P) (i gamma + w - g - mu)) /
//   (gamma^2 + 2 mu g + g^2 - 2 i gamma w - w^2)
// Throws resonance_error when |denominator| <= 1e-12.
std::complex<double> bogoliubov_response_rates(double g, double mu,
                                               double gamma, double w,
                                               std::complex<double> pump_tilde);

std::complex<double> bogoliubov_response(const ResponseQuery& q);

struct ResponseMap {
  Grid grid;
  std::vector<double> magnitude;  // |delta psi_{-k}| per node, storage order
  std::vector<unsigned char> masked;  // 1 where the denominator was resonant
  int n_masked = 0;
};

// |bogoliubov_response| over the grid's k-lattice; resonant nodes are masked
// (magnitude 0) and counted instead of raising.
ResponseMap response_map(const Grid& grid, const ResponseQuery& tmpl);

}  // namespace pfqm
