#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "pfqm/dispersion.hpp"
#include "pfqm/spectral.hpp"

namespace pfqm {

// Coherent pump P(r,t) = P0(r) exp(i k_i.r) exp(-i omega_i t / hbar).
// Amplitudes are hbar-scaled (meV times field units); the equation of motion
// applies i P/hbar, so an amplitude A drives the field at rate A/hbar.
struct NoPump {};
struct HomogeneousPump {
  double amplitude;  // P0
};
struct GaussianPump {
  double amplitude;          // A
  double center_x, center_y;  // d, um
  double width;               // sigma, um
};

struct PumpSpec {
  std::variant<NoPump, HomogeneousPump, GaussianPump> profile = NoPump{};
  double k_i_x = 0.0, k_i_y = 0.0;  // 1/um
  double omega_i = 0.0;             // meV

  bool is_none() const { return std::holds_alternative<NoPump>(profile); }
  void validate() const;
};

struct NoPotential {};
struct HarmonicPotential {
  double strength;  // kappa_V, meV/um^2; V = kappa_V r^2
};
struct MexicanHatPotential {
  double strength;       // kappa_V
  double hat_amplitude;  // A_V, meV
  double hat_width;      // sigma_V, um
};
struct TabulatedPotential {
  std::vector<double> values;  // meV per node, storage order
};

struct PotentialSpec {
  std::variant<NoPotential, HarmonicPotential, MexicanHatPotential,
               TabulatedPotential>
      form = NoPotential{};
  void validate() const;
};

// All coefficients of the equation of motion
//   i dpsi/dt = (1 - i eta) (K/hbar) * psi + i P/hbar - i (gamma/2) psi
//               + ((alpha |psi|^2 + V + omega)/hbar) psi
// with K the kinetic multiplier in meV and * a k-space convolution.
struct ModelParams {
  double alpha = 0.0;  // meV um^d
  double gamma = 0.0;  // 1/ps
  double eta = 0.0;    // dimensionless
  double omega = 0.0;  // meV
  KineticSpec kinetic = constant_mass_spec(mass_from_electron_masses(1e-4));
  PumpSpec pump;
  PotentialSpec potential;

  void validate() const;
};

struct SimState {
  SpectralField field;  // real space
  double time = 0.0;    // ps
};

// Raised on non-finite fields or a tripped amplitude watchdog.
class evolve_error : public std::runtime_error {
 public:
  evolve_error(const std::string& msg, double time, double max_abs, long step,
               long node = -1)
      : std::runtime_error(msg),
        time(time),
        max_abs(max_abs),
        step(step),
        node(node) {}
  double time;
  double max_abs;
  long step;
  long node;
};

// Per-node factors exp(-i (1 - i eta) K(|k|) dt / hbar). For eta > 0 and
// K < 0 the modulus exceeds one: the relaxation term amplifies modes above
// the inflection point.
std::vector<std::complex<double>> kinetic_phase_table(const Grid& grid,
                                                      const ModelParams& p,
                                                      double dt);

enum class SplitOrder { local_kinetic_local, kinetic_local_kinetic };

struct EvolveOptions {
  SplitOrder split = SplitOrder::local_kinetic_local;
  int local_substeps = 4;        // RK4 substeps per local stage (pumped case)
  double watchdog_max_abs = 1e8;  // abort threshold on max |psi|
};

struct ObserverSample {
  double t = 0.0;
  double mass = 0.0;                 // sum |psi|^2 * cell
  double max_abs = 0.0;              // max |psi|
  double kinetic_expectation = 0.0;  // <psi, K psi>, meV * mass units
  double pump_inner_real = 0.0;      // Re <psi, P(t)>
};

class Evolver {
 public:
  Evolver(const Grid& grid, const ModelParams& params, double dt,
          EvolveOptions options = {});

  // Pointwise part over [t, t+dt]. Closed form when the pump is off,
  // otherwise fixed-step RK4. Returns max |psi|; throws evolve_error with
  // the node index on non-finite values.
  double local_step(std::vector<std::complex<double>>& psi, double t,
                    double dt);

  // Exact k-space propagation of the kinetic part over dt_.
  void kinetic_step(std::vector<std::complex<double>>& psi);

  // One Strang step; advances state.time by dt_.
  void step(SimState& state);

  ObserverSample sample(const SimState& state);

  const std::vector<double>& symbol() const { return symbol_; }
  const std::vector<std::complex<double>>& kinetic_phases() const {
    return kin_phase_;
  }
  double dt() const { return dt_; }
  const Grid& grid() const { return grid_; }

 private:
  std::complex<double> local_rhs(std::complex<double> psi, double v,
                                 std::complex<double> pump_env,
                                 std::complex<double> pump_phase) const;

  Grid grid_;
  ModelParams params_;
  double dt_;
  EvolveOptions options_;
  std::vector<double> v_;                          // V(r) per node
  std::vector<std::complex<double>> pump_env_;     // P0(r) e^{i k_i.r}
  std::vector<double> symbol_;                     // K(|k|) per node, meV
  std::vector<std::complex<double>> kin_phase_;
  std::vector<std::complex<double>> kin_phase_half_;  // KLK variant only
  long steps_done_ = 0;
};

struct EvolveResult {
  std::vector<ObserverSample> samples;
  long steps = 0;
};

using ObserverHook =
    std::function<void(const SimState&, const ObserverSample&)>;

// Repeated Strang steps from state.time to t_final. Observers fire every
// observer_stride steps (and at the first and last step); stride 0 records
// only the endpoints.
EvolveResult evolve(SimState& state, const ModelParams& params, double t_final,
                    double dt, int observer_stride,
                    const EvolveOptions& options = {},
                    const ObserverHook& hook = {});

// Potential table in storage order (helper shared with the CLI).
std::vector<double> potential_table(const Grid& grid, const PotentialSpec& p);

}  // namespace pfqm
