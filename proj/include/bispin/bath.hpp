#ifndef BISPIN_BATH_HPP
#define BISPIN_BATH_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bispin/constants.hpp"

namespace bispin {

inline constexpr double kSiLatticeConstantNm = 0.543;
inline constexpr double kSi29Abundance = 0.0467;

/// Shell radii of the diamond lattice in units of a0.
inline double nearest_neighbour_distance(double a0) { return a0 * std::sqrt(3.0) / 4.0; }
inline double second_neighbour_distance(double a0) { return a0 * std::sqrt(2.0) / 2.0; }
inline double third_neighbour_distance(double a0) { return a0 * std::sqrt(11.0) / 4.0; }

struct LatticeSpec {
  double a0_nm = kSiLatticeConstantNm;
  double side_nm = 27.8;

  /// Whole conventional cells per edge; only cells fully inside the cube are kept.
  int cells_per_edge() const { return static_cast<int>(std::floor(side_nm / a0_nm + 1e-9)); }
};

/// Diamond-cubic sites in donor-relative integer coordinates (units of a0/4).
/// The donor sits on the fcc-sublattice site nearest the cube centre and is
/// itself one of the sites.
struct Lattice {
  double a0_nm = kSiLatticeConstantNm;
  std::vector<Eigen::Vector3i> sites;

  std::size_t size() const { return sites.size(); }
  Eigen::Vector3d position_nm(std::size_t k) const { return sites[k].cast<double>() * (a0_nm / 4.0); }
};

Lattice generate_lattice(const LatticeSpec& spec);

/// Counter-based uniform in [0,1) for (seed, key): SplitMix64 finalizer on
/// seed and key, top 53 bits. Identical on every platform.
double counter_uniform(std::uint64_t seed, std::uint64_t key);

/// 21 bits per axis, offset so that negative coordinates pack.
std::uint64_t site_key(const Eigen::Vector3i& quarter);

struct SpinPair {
  std::size_t k = 0;
  std::size_t l = 0;
  double b_mhz = 0.0;
};

struct BathConfiguration {
  std::uint64_t seed = 0;
  double a0_nm = kSiLatticeConstantNm;
  std::vector<Eigen::Vector3i> occupied;   // donor-relative, a0/4 units
  std::vector<double> couplings_j_mhz;     // filled by attach_couplings
  std::vector<SpinPair> pairs;             // filled by attach_couplings

  Eigen::Vector3d position_nm(std::size_t k) const { return occupied[k].cast<double>() * (a0_nm / 4.0); }
};

/// Independent per-site draws; the donor site is never occupied.
BathConfiguration occupy(const Lattice& lattice, double abundance, std::uint64_t seed);

/// Effective-mass constants of the six-valley donor wavefunction.
struct KohnLuttinger {
  double k0_fraction = 0.85;     // k0 = fraction * 2 pi / a0
  double a_nm = 2.509;           // transverse Bohr radius
  double b_nm = 1.443;           // longitudinal Bohr radius
  double e0_mev = 31.3;          // effective-mass Rydberg
  double ionization_mev = 69.0;  // Bi donor
  double eta = 186.0;            // charge-density enhancement at 29Si sites

  double radius_scale() const { return std::sqrt(e0_mev / ionization_mev); }
};

/// |psi(r)|^2 in nm^-3 for the six-valley Kohn-Luttinger wavefunction.
double kohn_luttinger_density(const Eigen::Vector3d& r_nm, const KohnLuttinger& kl, double a0_nm);

/// Fermi-contact superhyperfine coupling (MHz) of a 29Si at r (donor-relative).
double superhyperfine_j(const Eigen::Vector3d& r_nm, const KohnLuttinger& kl, double a0_nm, double g_factor,
                        const PhysicalConstants& pc = codata2018);

/// Secular 29Si-29Si dipolar coefficient b (MHz) of b [Iz Iz - (I+I- + I-I+)/4].
double dipolar_b(const Eigen::Vector3d& pos_k_nm, const Eigen::Vector3d& pos_l_nm, const Eigen::Vector3d& b_direction,
                 const PhysicalConstants& pc = codata2018);

/// Fill J per site and enumerate all pairs with separation <= r_max.
void attach_couplings(BathConfiguration& config, const KohnLuttinger& kl, double g_factor, double r_max_nm,
                      const Eigen::Vector3d& b_direction, const PhysicalConstants& pc = codata2018);

}  // namespace bispin

#endif  // BISPIN_BATH_HPP
