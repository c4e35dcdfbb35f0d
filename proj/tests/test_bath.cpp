#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "bispin/bath.hpp"

using namespace bispin;

namespace {

const PhysicalConstants& kPc = codata2018;

// Independent evaluation of the six-valley density: complex plane waves
// exp(i k0 r.e_mu) summed over the valleys, modulus squared at the end.
double density_oracle(const Eigen::Vector3d& r, const KohnLuttinger& kl, double a0) {
  const double n = std::sqrt(kl.e0_mev / kl.ionization_mev);
  const double a = n * kl.a_nm, b = n * kl.b_nm;
  const double k0 = kl.k0_fraction * 2.0 * std::numbers::pi / a0;
  std::complex<double> psi = 0.0;
  for (int axis = 0; axis < 3; ++axis)
    for (double sign : {1.0, -1.0}) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(axis) = sign;
      const double z = r.dot(e);
      const Eigen::Vector3d perp = r - z * e;
      const double f = std::exp(-std::sqrt(perp.squaredNorm() / (a * a) + z * z / (b * b))) / std::sqrt(std::numbers::pi * a * a * b);
      psi += f * std::polar(1.0, k0 * z);
    }
  psi /= std::sqrt(6.0);
  return std::norm(psi);
}

}  // namespace

TEST_CASE("lattice counts") {
  const Lattice small = generate_lattice({kSiLatticeConstantNm, 2 * kSiLatticeConstantNm});
  CHECK(small.size() == 64);
  CHECK_THROWS_AS(generate_lattice({kSiLatticeConstantNm, 1.5 * kSiLatticeConstantNm}), std::invalid_argument);
  const Lattice big = generate_lattice({kSiLatticeConstantNm, 27.8});
  CHECK(big.size() == 8u * 51 * 51 * 51);
  CHECK(static_cast<double>(big.size()) == doctest::Approx(1.06e6).epsilon(0.01).scale(0));
}

TEST_CASE("donor sits on a lattice site near the centre") {
  for (double side : {1.2, 3.0, 7.0, 14.0}) {
    const LatticeSpec spec{kSiLatticeConstantNm, side};
    const Lattice lat = generate_lattice(spec);
    int donors = 0;
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e9), hi = -lo;
    for (std::size_t k = 0; k < lat.size(); ++k) {
      if (lat.sites[k].isZero()) ++donors;
      lo = lo.cwiseMin(lat.position_nm(k));
      hi = hi.cwiseMax(lat.position_nm(k));
    }
    CHECK(donors == 1);
    const Eigen::Vector3d centre = 0.5 * (lo + hi);
    CHECK(centre.norm() < kSiLatticeConstantNm);
  }
}

TEST_CASE("nearest-neighbour distance by brute force") {
  const Lattice lat = generate_lattice({kSiLatticeConstantNm, 2 * kSiLatticeConstantNm});
  double best = 1e9;
  for (std::size_t i = 0; i < lat.size(); ++i)
    for (std::size_t j = i + 1; j < lat.size(); ++j) best = std::min(best, (lat.position_nm(i) - lat.position_nm(j)).norm());
  CHECK(best == doctest::Approx(0.2351).epsilon(1e-4 / 0.2351).scale(0));
  CHECK(best == doctest::Approx(nearest_neighbour_distance(kSiLatticeConstantNm)).epsilon(1e-12).scale(0));
}

TEST_CASE("occupancy statistics and limits") {
  const Lattice lat = generate_lattice({kSiLatticeConstantNm, 27.8});
  const double n = static_cast<double>(lat.size() - 1);
  const BathConfiguration cfg = occupy(lat, kSi29Abundance, 7);
  const double sigma = std::sqrt(n * kSi29Abundance * (1 - kSi29Abundance));
  CHECK(std::abs(static_cast<double>(cfg.occupied.size()) - n * kSi29Abundance) < 3 * sigma);

  const Lattice small = generate_lattice({kSiLatticeConstantNm, 3.0});
  CHECK(occupy(small, 0.0, 1).occupied.empty());
  const BathConfiguration full = occupy(small, 1.0, 1);
  CHECK(full.occupied.size() == small.size() - 1);
  for (const auto& q : full.occupied) CHECK(!q.isZero());
  CHECK_THROWS_AS(occupy(small, 1.5, 1), std::invalid_argument);
}

TEST_CASE("occupancy is a function of (seed, site) only") {
  const Lattice small = generate_lattice({kSiLatticeConstantNm, 5.0});
  const Lattice large = generate_lattice({kSiLatticeConstantNm, 9.0});
  const BathConfiguration a = occupy(small, 0.2, 42), b = occupy(large, 0.2, 42), c = occupy(small, 0.2, 42);
  CHECK(a.occupied == c.occupied);
  auto key = [](const Eigen::Vector3i& q) { return site_key(q); };
  std::set<std::uint64_t> in_large;
  for (const auto& q : b.occupied) in_large.insert(key(q));
  // Sites of the small cube that are also in the large cube carry the same draw.
  std::set<std::uint64_t> large_sites;
  for (const auto& q : large.sites) large_sites.insert(key(q));
  for (const auto& q : a.occupied)
    if (large_sites.count(key(q))) CHECK(in_large.count(key(q)) == 1);
  CHECK(occupy(small, 0.2, 43).occupied != a.occupied);
}

TEST_CASE("counter_uniform is in [0,1) and pinned") {
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const double u = counter_uniform(3, k);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(counter_uniform(1, 2) == counter_uniform(1, 2));
  CHECK(counter_uniform(1, 2) != counter_uniform(2, 1));
}

TEST_CASE("superhyperfine J") {
  const KohnLuttinger kl;
  const double a0 = kSiLatticeConstantNm;
  const Eigen::Vector3d fourth(a0, 0.0, 0.0);
  const double rho = kohn_luttinger_density(fourth, kl, a0);
  CHECK(rho == doctest::Approx(density_oracle(fourth, kl, a0)).epsilon(1e-12).scale(0));
  for (const Eigen::Vector3d& r : {Eigen::Vector3d(0.3, -0.7, 1.1), Eigen::Vector3d(2.0, 2.0, 0.1)}) {
    CHECK(kohn_luttinger_density(r, kl, a0) == doctest::Approx(density_oracle(r, kl, a0)).epsilon(1e-12).scale(0));
  }
  const double j4 = superhyperfine_j(fourth, kl, a0, 2.0003, kPc);
  const double prefactor = 4.0 * kPc.vacuum_permeability_mu0 / 3.0 * 2.0003 * kPc.bohr_magneton * kPc.gyro_si29 * 1e6 * kl.eta;
  CHECK(j4 == doctest::Approx(prefactor * density_oracle(fourth, kl, a0) * 1e27 * 1e-6).epsilon(1e-12).scale(0));
  CHECK(j4 == doctest::Approx(-11.944151).epsilon(1e-6).scale(0));  // frozen regression, MHz

  // Envelope dominance: beyond 3 n a, sampled where every valley phase is 1.
  const double n = kl.radius_scale();
  const double period = a0 / kl.k0_fraction;
  const int first = static_cast<int>(std::ceil(3.0 * n * kl.a_nm / period));
  double prev = std::abs(superhyperfine_j(Eigen::Vector3d(first * period, 0, 0), kl, a0, 2.0003, kPc));
  for (int k = first + 1; k <= first + 40; ++k) {
    const double cur = std::abs(superhyperfine_j(Eigen::Vector3d(k * period, 0, 0), kl, a0, 2.0003, kPc));
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(std::abs(superhyperfine_j(Eigen::Vector3d(40.0, 0.0, 0.0), kl, a0, 2.0003, kPc)) < 1e-12);
  CHECK_THROWS_AS(superhyperfine_j(Eigen::Vector3d::Zero(), kl, a0, 2.0003, kPc), std::domain_error);
}

TEST_CASE("dipolar b") {
  const Eigen::Vector3d z(0, 0, 1);
  const double magic = std::acos(1.0 / std::sqrt(3.0));
  const Eigen::Vector3d r_magic(std::sin(magic), 0.0, std::cos(magic));
  CHECK(std::abs(dipolar_b(Eigen::Vector3d::Zero(), 0.3 * r_magic, z, kPc)) < 1e-15);
  const double par = dipolar_b(Eigen::Vector3d::Zero(), Eigen::Vector3d(0, 0, 0.3), z, kPc);
  const double perp = dipolar_b(Eigen::Vector3d::Zero(), Eigen::Vector3d(0.3, 0, 0), z, kPc);
  CHECK(par / perp == doctest::Approx(-2.0).epsilon(1e-12).scale(0));
  const double nn = dipolar_b(Eigen::Vector3d::Zero(), Eigen::Vector3d(nearest_neighbour_distance(kSiLatticeConstantNm), 0, 0), z, kPc);
  CHECK(std::abs(nn) * 1e3 == doctest::Approx(0.3654).epsilon(1e-3).scale(0));  // kHz: (mu0/4pi) gamma^2 hbar / r^3 / 2pi by hand
  CHECK_THROWS_AS(dipolar_b(Eigen::Vector3d::Ones(), Eigen::Vector3d::Ones(), z, kPc), std::invalid_argument);
}

TEST_CASE("pair list matches a brute-force search") {
  const Lattice lat = generate_lattice({kSiLatticeConstantNm, 3.3});
  BathConfiguration cfg = occupy(lat, 0.3, 5);
  const double a0 = kSiLatticeConstantNm;
  for (double r_max : {nearest_neighbour_distance(a0), second_neighbour_distance(a0), third_neighbour_distance(a0)}) {
    attach_couplings(cfg, KohnLuttinger{}, 2.0003, r_max, Eigen::Vector3d(1, -1, 0).normalized(), kPc);
    std::size_t brute = 0;
    for (std::size_t k = 0; k < cfg.occupied.size(); ++k)
      for (std::size_t l = k + 1; l < cfg.occupied.size(); ++l)
        if ((cfg.position_nm(k) - cfg.position_nm(l)).norm() <= r_max + 1e-9) ++brute;
    CHECK(cfg.pairs.size() == brute);
    for (const auto& p : cfg.pairs) {
      CHECK(p.l > p.k);
      CHECK((cfg.position_nm(p.k) - cfg.position_nm(p.l)).norm() <= r_max + 1e-9);
    }
  }
  CHECK(cfg.couplings_j_mhz.size() == cfg.occupied.size());
}
