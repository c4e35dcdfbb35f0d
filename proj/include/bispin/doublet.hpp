#ifndef BISPIN_DOUBLET_HPP
#define BISPIN_DOUBLET_HPP

#include <utility>

#include <Eigen/Dense>

#include "bispin/spin_core.hpp"

namespace bispin {

/// Closed-form 2x2 block h_m = Delta sigma_z + Omega sigma_x - eps 1 of the
/// constant-m doublet, in MHz. Basis order (|+1/2, m-1/2>, |-1/2, m+1/2>).
struct DoubletParams {
  int m = 0;
  double field_b = 0.0;
  double delta_m = 0.0;    // (m A + f0 (1 + delta)) / 2
  double omega_m = 0.0;    // (A/2) sqrt((I+1/2)^2 - m^2)
  double epsilon_m = 0.0;  // A/4 + m delta f0
  double beta_m = 0.0;     // sqrt(Delta^2 + Omega^2)
  double theta_m = 0.0;    // atan2(Omega, Delta), in (0, pi)
};

DoubletParams doublet_params(const SpinSystem& sys, int m, double b_tesla);

struct DoubletEnergies {
  double plus = 0.0;
  double minus = 0.0;
};

/// E+- = +-beta - eps.
DoubletEnergies doublet_energies(const DoubletParams& p);

/// Energies of the unmixed states m = +(I+1/2) and m = -(I+1/2):
/// +-f0/2 -+ I f0 delta + I A / 2.
struct UnmixedEnergies {
  double m_plus = 0.0;
  double m_minus = 0.0;
};
UnmixedEnergies unmixed_energies(const SpinSystem& sys, double b_tesla);

struct DoubletState {
  int m = 0;
  Branch branch = Branch::plus;
  double amplitude_cos = 1.0;  // cos(theta/2)
  double amplitude_sin = 0.0;  // sin(theta/2)
  std::pair<int, int> basis_kets{};  // product-basis indices of |+1/2,m-1/2>, |-1/2,m+1/2>

  /// Full product-basis vector, phase convention matching diagonalize().
  Eigen::VectorXcd vector(const SpinSystem& sys) const;
};

/// |+,m> = cos|+1/2,m-1/2> + sin|-1/2,m+1/2>; |-,m> = cos|-1/2,m+1/2> - sin|+1/2,m-1/2>.
DoubletState doublet_state(const SpinSystem& sys, const DoubletParams& p, Branch branch);

/// Field at which Delta_m = 0 (theta = pi/2, Bell-like doublet). Requires m < 0.
double bell_field(const SpinSystem& sys, int m);

}  // namespace bispin

#endif  // BISPIN_DOUBLET_HPP
