#ifndef BISPIN_SPIN_CORE_HPP
#define BISPIN_SPIN_CORE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "bispin/constants.hpp"

namespace bispin {

template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
struct AngularMomentum {
  CMatrix<Scalar> x, y, z;
};

/// Jx, Jy, Jz for spin j in the |j, m> basis ordered m = j, j-1, ..., -j.
template <typename Scalar = double>
AngularMomentum<Scalar> spin_matrices(double j) {
  const double twice = 2.0 * j;
  if (!(j >= 0.0) || std::abs(twice - std::round(twice)) > 1e-12) {
    throw std::invalid_argument("spin_matrices: j must be a non-negative half-integer");
  }
  const int dim = static_cast<int>(std::round(twice)) + 1;
  using C = std::complex<Scalar>;
  CMatrix<Scalar> jp = CMatrix<Scalar>::Zero(dim, dim);
  CMatrix<Scalar> jz = CMatrix<Scalar>::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const Scalar m = static_cast<Scalar>(j - k);
    jz(k, k) = C(m, 0);
    if (k > 0) {
      // <m+1| J+ |m>, row k-1 holds m+1
      jp(k - 1, k) = C(std::sqrt(static_cast<Scalar>(j * (j + 1)) - m * (m + 1)), 0);
    }
  }
  const CMatrix<Scalar> jm = jp.adjoint();
  AngularMomentum<Scalar> out;
  out.x = (jp + jm) * C(0.5, 0);
  out.y = (jp - jm) * C(0, -0.5);
  out.z = jz;
  return out;
}

/// One donor species: electron spin S coupled isotropically to nuclear spin I.
/// Energies are handled as E/h in MHz throughout.
struct SpinSystem {
  double electron_spin = 0.5;
  double nuclear_spin = 4.5;
  double hyperfine_mhz = 1475.4;
  double g_factor = 2.0003;
  double nuclear_ratio_delta = 2.488e-4;
  PhysicalConstants constants = codata2018;

  static SpinSystem si_bi() { return {}; }

  void validate() const;
  int nuclear_multiplicity() const { return static_cast<int>(std::lround(2.0 * nuclear_spin)) + 1; }
  int dimension() const { return 2 * nuclear_multiplicity(); }
  /// Largest |m| of the doublets, I - 1/2.
  int max_doublet_m() const { return nuclear_multiplicity() / 2 - 1; }
  /// Electron Zeeman frequency f0 = g muB B / h in MHz.
  double zeeman_mhz(double b_tesla) const {
    return constants.electron_mhz_per_tesla(g_factor) * b_tesla;
  }
};

struct SpinOperators {
  Eigen::MatrixXcd sx, sy, sz, ix, iy, iz;

  static SpinOperators for_system(const SpinSystem& sys);
  Eigen::MatrixXcd s_dot_i() const { return sx * ix + sy * iy + sz * iz; }
  Eigen::MatrixXcd fz() const { return sz + iz; }
};

/// Row/column of |m_s, m_I> in the product basis (both descending).
int basis_index(const SpinSystem& sys, double m_s, double m_i);

Eigen::MatrixXcd build_hamiltonian(const SpinSystem& sys, double b_tesla);

enum class Branch { minus, plus };

/// Conserved m = m_s + m_I and branch within the doublet. The unmixed
/// extreme states are (minus, -(I+1/2)) and (plus, I+1/2).
struct DoubletId {
  int m = 0;
  Branch branch = Branch::minus;
  friend bool operator==(const DoubletId&, const DoubletId&) = default;
};

// Adiabatic labels: label(-,m) = (I+1/2) - m, label(+,m) = 3I + 3/2 + m.
// For Si:Bi this is 5 - m and 15 + m; state 10 = |-1/2,-9/2>, state 20 = |+1/2,+9/2>.
int label_of(const SpinSystem& sys, DoubletId id);
DoubletId doublet_of(const SpinSystem& sys, int label);

struct DonorEigensystem {
  double field_b = 0.0;
  Eigen::VectorXd energies;   // MHz, entry label-1
  Eigen::MatrixXcd states;    // column label-1
  std::vector<DoubletId> doublet_ids;

  int size() const { return static_cast<int>(energies.size()); }
  double energy(int label) const { return energies(index(label)); }
  Eigen::VectorXcd state(int label) const { return states.col(index(label)); }
  /// Labels ordered by ascending energy.
  std::vector<int> labels_by_energy() const;

 private:
  int index(int label) const {
    if (label < 1 || label > size()) throw std::out_of_range("DonorEigensystem: label out of range");
    return label - 1;
  }
};

DonorEigensystem diagonalize(const SpinSystem& sys, double b_tesla);

double expectation_sz(const DonorEigensystem& es, int label);
double expectation_sz(const Eigen::VectorXcd& state);

/// Electron-nucleus concurrence sqrt(2 (1 - Tr rho_e^2)) of a pure state.
double concurrence(const DonorEigensystem& es, int label);
double concurrence(const Eigen::VectorXcd& state);

}  // namespace bispin

#endif  // BISPIN_SPIN_CORE_HPP
