#pragma once

#include <variant>
#include <vector>

#include "pfqm/units.hpp"

namespace pfqm {

// Microcavity constants defining the two polariton branches.
// Masses are in units of hbar^2/(meV um^2); use mass_from_electron_masses()
// to convert. The refractive index, cavity length and mode number only enter
// through cavity_offset and photon_mass and are not stored separately.
struct CavityParams {
  double exciton_energy = 1557.0;  // E_x(0), meV
  double cavity_offset = 1557.0;   // E_c(0), meV
  double photon_mass = mass_from_electron_masses(1.0e-4);
  double exciton_mass = mass_from_electron_masses(0.5);
  double rabi = 0.9420707155;      // hbar*Omega_R, meV (see default_cavity)
  bool paraxial = true;            // false: exact square-root photon branch

  void validate() const;  // throws std::invalid_argument
};

// Default parameter set. Zero detuning, m_c = 1e-4 m_e, m_x = 0.5 m_e,
// E_x = 1557 meV; the Rabi energy is calibrated with rabi_for_inflection()
// so the lower-branch inflection sits at k = 1.3952 1/um.
CavityParams default_cavity();

double cavity_energy(double k, const CavityParams& p);   // E_c(k), meV
double exciton_energy(double k, const CavityParams& p);  // E_x(k), meV

struct BranchEnergies {
  double lower;  // E_L, meV
  double upper;  // E_U, meV
};
BranchEnergies branch_energies(double k, const CavityParams& p);

// Analytic d^2 E_L / dk^2 in meV um^2. Positive below the inflection point,
// negative above it.
double lower_branch_curvature(double k, const CavityParams& p);

// d^2 E_L / dk^2 / hbar^2, i.e. 1/m(k) in units of (meV um^2)/hbar^2.
// Exposed as an inverse because m(k) itself diverges at the inflection.
double inverse_effective_mass(double k, const CavityParams& p);

// Bisection root of lower_branch_curvature on [k_lo, k_hi].
// Throws std::domain_error if the curvature does not change sign there.
double find_inflection(const CavityParams& p, double k_lo, double k_hi,
                       double tol = 1e-12);

// Rabi energy (meV) that places the lower-branch inflection at k_inf for the
// given masses and detuning. One-dimensional bisection; this is how the
// default_cavity() value was produced.
double rabi_for_inflection(CavityParams base, double k_inf);

// ---- kinetic Fourier multiplier -------------------------------------------

struct ConstantMass {
  double mass;  // hbar^2/(meV um^2) units
};
struct FractionalPower {
  double s;            // exponent, 0 < s <= 1
  double coefficient;  // c_s, meV um^(2s)
};
struct LowerBranchCurvature {
  CavityParams params;
};
struct Tabulated {
  std::vector<double> k_nodes;   // 1/um, strictly increasing, >= 2 points
  std::vector<double> g_values;  // meV, raw (unhalved) convention
};

// Tagged choice of the multiplier g(k). With prefactor_half (the default for
// dynamics) every variant is halved so the constant-mass limit is the
// standard hbar^2 k^2/(2m); prefactor_half = false gives the raw
// k^2 d^2E/dk^2 convention.
struct KineticSpec {
  std::variant<ConstantMass, FractionalPower, LowerBranchCurvature, Tabulated>
      form;
  bool prefactor_half = true;

  void validate() const;
};

KineticSpec constant_mass_spec(double mass, bool half = true);
KineticSpec fractional_spec(double s, double coefficient, bool half = true);
KineticSpec curvature_spec(const CavityParams& p, bool half = true);

// g(k) in meV. Tabulated queries outside the node range throw
// std::domain_error.
double kinetic_prefactor_g(double k, const KineticSpec& spec);

}  // namespace pfqm
