#ifndef BISPIN_CONSTANTS_HPP
#define BISPIN_CONSTANTS_HPP

#include <numbers>

namespace bispin {

// CODATA-2018 exact/recommended values, SI units.
struct PhysicalConstants {
  double planck_h = 6.62607015e-34;           // J s
  double bohr_magneton = 9.2740100783e-24;    // J/T
  double boltzmann_kB = 1.380649e-23;         // J/K
  double vacuum_permeability_mu0 = 1.25663706212e-6;  // T^2 m^3 / J
  double gyro_si29 = -8.4655;                 // MHz/T, gamma/2pi of 29Si

  double hbar() const { return planck_h / (2.0 * std::numbers::pi); }

  // g * muB / h expressed in MHz/T.
  double electron_mhz_per_tesla(double g) const {
    return g * bohr_magneton / planck_h * 1e-6;
  }
};

inline constexpr PhysicalConstants codata2018{};

}  // namespace bispin

#endif  // BISPIN_CONSTANTS_HPP
