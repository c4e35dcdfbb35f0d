#include "bispin/bath.hpp"

#include <array>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace bispin {

namespace {

constexpr std::array<std::array<int, 3>, 8> kDiamondBasisQuarter{{
    {0, 0, 0}, {0, 2, 2}, {2, 0, 2}, {2, 2, 0},
    {1, 1, 1}, {1, 3, 3}, {3, 1, 3}, {3, 3, 1},
}};

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool on_fcc_sublattice(const Eigen::Vector3i& q) {
  return q.x() % 2 == 0 && q.y() % 2 == 0 && q.z() % 2 == 0 && (q.x() + q.y() + q.z()) % 4 == 0;
}

}  // namespace

Lattice generate_lattice(const LatticeSpec& spec) {
  if (!(spec.a0_nm > 0.0)) throw std::invalid_argument("generate_lattice: a0 must be positive");
  const int n = spec.cells_per_edge();
  if (n < 2) throw std::invalid_argument("generate_lattice: side must be at least 2 a0");

  Lattice lat;
  lat.a0_nm = spec.a0_nm;
  lat.sites.reserve(static_cast<std::size_t>(8) * n * n * n);
  for (int cx = 0; cx < n; ++cx)
    for (int cy = 0; cy < n; ++cy)
      for (int cz = 0; cz < n; ++cz)
        for (const auto& b : kDiamondBasisQuarter) lat.sites.emplace_back(4 * cx + b[0], 4 * cy + b[1], 4 * cz + b[2]);

  // Donor: fcc site nearest the geometric centre (2n, 2n, 2n); first in enumeration order wins ties.
  const Eigen::Vector3i centre = Eigen::Vector3i::Constant(2 * n);
  std::size_t best = 0;
  int best_d2 = std::numeric_limits<int>::max();
  for (std::size_t k = 0; k < lat.sites.size(); ++k) {
    if (!on_fcc_sublattice(lat.sites[k])) continue;
    const int d2 = (lat.sites[k] - centre).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = k;
    }
  }
  const Eigen::Vector3i donor = lat.sites[best];
  for (auto& s : lat.sites) s -= donor;
  return lat;
}

std::uint64_t site_key(const Eigen::Vector3i& q) {
  constexpr std::int64_t offset = 1 << 20;
  const auto axis = [](int v) {
    const std::int64_t shifted = static_cast<std::int64_t>(v) + offset;
    if (shifted < 0 || shifted >= (offset << 1)) throw std::out_of_range("site_key: coordinate out of range");
    return static_cast<std::uint64_t>(shifted);
  };
  return (axis(q.x()) << 42) | (axis(q.y()) << 21) | axis(q.z());
}

double counter_uniform(std::uint64_t seed, std::uint64_t key) {
  const std::uint64_t bits = splitmix64(seed ^ splitmix64(key));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

BathConfiguration occupy(const Lattice& lattice, double abundance, std::uint64_t seed) {
  if (!(abundance >= 0.0 && abundance <= 1.0)) throw std::invalid_argument("occupy: abundance must be in [0,1]");
  BathConfiguration config;
  config.seed = seed;
  config.a0_nm = lattice.a0_nm;
  for (const auto& q : lattice.sites) {
    if (q.isZero()) continue;
    if (counter_uniform(seed, site_key(q)) < abundance) config.occupied.push_back(q);
  }
  return config;
}

double kohn_luttinger_density(const Eigen::Vector3d& r, const KohnLuttinger& kl, double a0_nm) {
  const double n = kl.radius_scale();
  const double na = n * kl.a_nm;
  const double nb = n * kl.b_nm;
  const double k0 = kl.k0_fraction * 2.0 * std::numbers::pi / a0_nm;
  const double envelope_norm = 1.0 / std::sqrt(std::numbers::pi * na * na * nb);

  // Valleys +-x, +-y, +-z pair up into 2 F cos(k0 r_axis).
  double psi = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double along = r(axis);
    const double across2 = r.squaredNorm() - along * along;
    const double envelope = envelope_norm * std::exp(-std::sqrt(across2 / (na * na) + along * along / (nb * nb)));
    psi += 2.0 * envelope * std::cos(k0 * along);
  }
  psi /= std::sqrt(6.0);
  return psi * psi;
}

double superhyperfine_j(const Eigen::Vector3d& r_nm, const KohnLuttinger& kl, double a0_nm, double g_factor,
                        const PhysicalConstants& pc) {
  if (r_nm.norm() < 1e-9) throw std::domain_error("superhyperfine_j: position at the donor site");
  const double density_m3 = kohn_luttinger_density(r_nm, kl, a0_nm) * 1e27;
  const double gyro_hz = pc.gyro_si29 * 1e6;
  const double j_hz =
      (4.0 * pc.vacuum_permeability_mu0 / 3.0) * g_factor * pc.bohr_magneton * gyro_hz * kl.eta * density_m3;
  return j_hz * 1e-6;
}

double dipolar_b(const Eigen::Vector3d& pos_k, const Eigen::Vector3d& pos_l, const Eigen::Vector3d& b_direction,
                 const PhysicalConstants& pc) {
  const Eigen::Vector3d d = pos_k - pos_l;
  const double r_nm = d.norm();
  if (r_nm < 1e-9) throw std::invalid_argument("dipolar_b: coincident positions");
  const double cos_theta = d.dot(b_direction.normalized()) / r_nm;
  const double r_m = r_nm * 1e-9;
  const double gyro_hz = pc.gyro_si29 * 1e6;
  const double mu0_4pi = pc.vacuum_permeability_mu0 / (4.0 * std::numbers::pi);
  const double b_hz = -mu0_4pi * gyro_hz * gyro_hz * pc.planck_h * (1.0 - 3.0 * cos_theta * cos_theta) / (r_m * r_m * r_m);
  return b_hz * 1e-6;
}

void attach_couplings(BathConfiguration& config, const KohnLuttinger& kl, double g_factor, double r_max_nm,
                      const Eigen::Vector3d& b_direction, const PhysicalConstants& pc) {
  config.couplings_j_mhz.resize(config.occupied.size());
  for (std::size_t k = 0; k < config.occupied.size(); ++k) {
    config.couplings_j_mhz[k] = superhyperfine_j(config.position_nm(k), kl, config.a0_nm, g_factor, pc);
  }

  const double quarter = config.a0_nm / 4.0;
  const double limit2 = r_max_nm * r_max_nm + 1e-9;
  const int reach = static_cast<int>(std::ceil(r_max_nm / quarter));
  std::vector<Eigen::Vector3i> offsets;
  for (int x = -reach; x <= reach; ++x)
    for (int y = -reach; y <= reach; ++y)
      for (int z = -reach; z <= reach; ++z) {
        const Eigen::Vector3i d(x, y, z);
        if (d.isZero()) continue;
        if (d.squaredNorm() * quarter * quarter <= limit2) offsets.push_back(d);
      }

  std::unordered_map<std::uint64_t, std::size_t> index;
  index.reserve(config.occupied.size() * 2);
  for (std::size_t k = 0; k < config.occupied.size(); ++k) index.emplace(site_key(config.occupied[k]), k);

  config.pairs.clear();
  for (std::size_t k = 0; k < config.occupied.size(); ++k) {
    for (const auto& d : offsets) {
      const auto it = index.find(site_key(config.occupied[k] + d));
      if (it == index.end() || it->second <= k) continue;
      const std::size_t l = it->second;
      config.pairs.push_back({k, l, dipolar_b(config.position_nm(k), config.position_nm(l), b_direction, pc)});
    }
  }
}

}  // namespace bispin
