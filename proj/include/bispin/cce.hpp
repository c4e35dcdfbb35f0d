#ifndef BISPIN_CCE_HPP
#define BISPIN_CCE_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bispin/bath.hpp"
#include "bispin/spin_core.hpp"

namespace bispin {

struct EchoCurve {
  Eigen::VectorXd times_ms;
  Eigen::VectorXd amplitude;
  Eigen::VectorXd std_of_mean;  // empty for single-configuration curves
};

struct PairCoupling {
  double j_k_mhz = 0.0;
  double j_l_mhz = 0.0;
  double b_mhz = 0.0;
};

/// Conditioned 4x4 pair Hamiltonian (MHz) for donor level with <Sz> = s,
/// basis |uu>, |ud>, |du>, |dd>.
Eigen::Matrix4d conditioned_pair_hamiltonian(const PairCoupling& pair, double s, double f_zeeman_mhz);

/// Hahn-echo pair factor 1/4 sum_chi <chi| Ua^+ Ub^+ Ua Ub |chi>, U(t/2) each,
/// averaged over the four unentangled bath product states.
std::vector<std::complex<double>> pair_echo(const PairCoupling& pair, double s_a, double s_b, double f_zeeman_mhz,
                                            std::span<const double> times_ms);

/// CCE-2: modulus of the product of all pair factors. Single-spin factors are
/// exactly 1 for conditioned Iz couplings and are not evaluated.
EchoCurve cce2_echo(const BathConfiguration& config, double s_a, double s_b, double f_zeeman_mhz,
                    std::span<const double> times_ms);

EchoCurve cce2_echo(const BathConfiguration& config, const SpinSystem& sys, int label_upper, int label_lower,
                    double b_tesla, std::span<const double> times_ms);

struct CceParams {
  int label_upper = 11;
  int label_lower = 10;
  double field_b = 0.3446;
  Eigen::Vector3d b_direction = Eigen::Vector3d(1.0, -1.0, 0.0).normalized();
  double r_max_nm = third_neighbour_distance(kSiLatticeConstantNm);
  int n_configs = 20;
  LatticeSpec lattice{kSiLatticeConstantNm, 14.0};
  double abundance = kSi29Abundance;
  KohnLuttinger kohn_luttinger{};
  Eigen::VectorXd times_ms = Eigen::VectorXd::LinSpaced(101, 0.0, 1.0);
  std::uint64_t seed_base = 1;
  int workers = 1;
};

/// Mean over configurations seeded seed_base + i and the standard deviation of
/// that mean. Output does not depend on the worker count.
EchoCurve ensemble_echo(const CceParams& params, const SpinSystem& sys);

struct ConvergenceEntry {
  double side_nm = 0.0;
  double r_max_nm = 0.0;
  EchoCurve curve;
};

struct ConvergenceTable {
  std::vector<ConvergenceEntry> entries;  // side-major, r_max inner
  std::vector<double> sides_nm;
  std::vector<double> r_max_nm;
  /// side_distance[r][s]: sup-norm between sides s and s+1 at r_max index r.
  std::vector<std::vector<double>> side_distance;
  /// r_max_distance[s][r]: sup-norm between r_max r and r+1 at side index s.
  std::vector<std::vector<double>> r_max_distance;

  const ConvergenceEntry& at(std::size_t side_index, std::size_t r_index) const {
    return entries[side_index * r_max_nm.size() + r_index];
  }
};

ConvergenceTable convergence_study(const CceParams& params, const SpinSystem& sys, std::span<const double> sides_nm,
                                   std::span<const double> r_max_list_nm);

double sup_norm_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace bispin

#endif  // BISPIN_CCE_HPP
