#pragma once

#include <cmath>

namespace qwi {

// Lengths in nm, energies in eV, masses as multiples of the electron rest mass.
struct UnitSystem {
  static constexpr double hbar_c_eV_nm = 197.3269804;
  static constexpr double electron_rest_energy_eV = 510998.95;

  // hbar^2 / (2 m0) in eV nm^2.
  static constexpr double hbar_sq_over_2m0 =
      hbar_c_eV_nm * hbar_c_eV_nm / (2.0 * electron_rest_energy_eV);
};

inline constexpr double hbar_sq_over_2m0 = UnitSystem::hbar_sq_over_2m0;

// Impedances are carried in sqrt(eV / mass-multiplier) units, i.e. z = sqrt((E - U) / m).
// In those units gamma = i * mass_over_hbar(m) * z and Z = psi' / (i * mass_over_hbar(m) * psi).
inline double mass_over_hbar(double mass) { return mass / std::sqrt(hbar_sq_over_2m0); }

}  // namespace qwi
