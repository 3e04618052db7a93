#pragma once

// Unit system: lengths in um, times in ps, energies in meV.
// Frequencies are stored as energies (meV) and converted by /hbar
// where a rate in 1/ps is needed.

namespace pfqm {

// hbar in meV*ps
inline constexpr double hbar = 0.6582119569;

// hbar^2/m_e in meV*um^2, from (hbar*c)^2 / (m_e c^2)
// with hbar*c = 197.3269804 meV*um and m_e c^2 = 5.1099895e8 meV.
inline constexpr double hbar2_over_me =
    197.3269804 * 197.3269804 / 5.1099895000e8;

// Masses are stored in units of hbar^2/(meV*um^2), so that the parabolic
// kinetic energy hbar^2 k^2 / (2 m) evaluates as k^2 / (2 m) in meV for
// k in 1/um.
inline constexpr double mass_from_electron_masses(double m_in_me) {
  return m_in_me / hbar2_over_me;
}

}  // namespace pfqm
