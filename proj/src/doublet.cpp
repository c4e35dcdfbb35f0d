#include "bispin/doublet.hpp"

#include <cmath>
#include <stdexcept>

namespace bispin {

DoubletParams doublet_params(const SpinSystem& sys, int m, double b_tesla) {
  sys.validate();
  if (std::abs(m) > sys.max_doublet_m()) throw std::invalid_argument("doublet_params: |m| > I - 1/2");
  if (!(b_tesla >= 0.0)) throw std::invalid_argument("doublet_params: B must be >= 0");

  const double a = sys.hyperfine_mhz;
  const double f0 = sys.zeeman_mhz(b_tesla);
  const double k = sys.nuclear_spin + 0.5;

  DoubletParams p;
  p.m = m;
  p.field_b = b_tesla;
  p.delta_m = 0.5 * (m * a + f0 * (1.0 + sys.nuclear_ratio_delta));
  p.omega_m = 0.5 * a * std::sqrt(k * k - static_cast<double>(m) * m);
  p.epsilon_m = 0.25 * a + m * sys.nuclear_ratio_delta * f0;
  p.beta_m = std::hypot(p.delta_m, p.omega_m);
  p.theta_m = std::atan2(p.omega_m, p.delta_m);
  return p;
}

DoubletEnergies doublet_energies(const DoubletParams& p) {
  return {p.beta_m - p.epsilon_m, -p.beta_m - p.epsilon_m};
}

UnmixedEnergies unmixed_energies(const SpinSystem& sys, double b_tesla) {
  sys.validate();
  const double f0 = sys.zeeman_mhz(b_tesla);
  const double spin_i = sys.nuclear_spin;
  const double contact = 0.5 * spin_i * sys.hyperfine_mhz;
  const double nuclear = spin_i * f0 * sys.nuclear_ratio_delta;
  return {0.5 * f0 - nuclear + contact, -0.5 * f0 + nuclear + contact};
}

Eigen::VectorXcd DoubletState::vector(const SpinSystem& sys) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(sys.dimension());
  if (branch == Branch::plus) {
    v(basis_kets.first) = amplitude_cos;
    v(basis_kets.second) = amplitude_sin;
  } else {
    v(basis_kets.second) = amplitude_cos;
    v(basis_kets.first) = -amplitude_sin;
  }
  return v;
}

DoubletState doublet_state(const SpinSystem& sys, const DoubletParams& p, Branch branch) {
  DoubletState s;
  s.m = p.m;
  s.branch = branch;
  s.amplitude_cos = std::cos(0.5 * p.theta_m);
  s.amplitude_sin = std::sin(0.5 * p.theta_m);
  s.basis_kets = {basis_index(sys, 0.5, p.m - 0.5), basis_index(sys, -0.5, p.m + 0.5)};
  return s;
}

double bell_field(const SpinSystem& sys, int m) {
  sys.validate();
  if (m >= 0) throw std::domain_error("bell_field: no positive-field solution for m >= 0");
  if (-m > sys.max_doublet_m()) throw std::invalid_argument("bell_field: |m| > I - 1/2");
  const double per_tesla = sys.constants.electron_mhz_per_tesla(sys.g_factor);
  return -m * sys.hyperfine_mhz / (per_tesla * (1.0 + sys.nuclear_ratio_delta));
}

}  // namespace bispin
