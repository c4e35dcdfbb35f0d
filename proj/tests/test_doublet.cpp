#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bispin/doublet.hpp"
#include "bispin/spin_core.hpp"

using namespace bispin;

namespace {

const SpinSystem kSiBi = SpinSystem::si_bi();
constexpr double kPi = std::numbers::pi;

// Bell field oracle: bisection on the difference of the two diagonal entries of
// the m-block, read straight out of the dense Hamiltonian.
double bell_field_by_bisection(int m) {
  const int up = basis_index(kSiBi, 0.5, m - 0.5);
  const int dn = basis_index(kSiBi, -0.5, m + 0.5);
  const auto gap = [&](double b) {
    const Eigen::MatrixXcd h = build_hamiltonian(kSiBi, b);
    return h(up, up).real() - h(dn, dn).real();
  };
  double lo = 0.0, hi = 2.0;
  REQUIRE(gap(lo) * gap(hi) < 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(lo) * gap(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("mixing angle of the m=-4 doublet") {
  CHECK(doublet_params(kSiBi, -4, 0.15).theta_m / kPi == doctest::Approx(0.62).epsilon(0.005 / 0.62).scale(0));
  // Hand value: f0 = g muB B / h, Delta = (-4 A + f0 (1 + delta)) / 2, Omega = 3 A / 2.
  const double f0 = 2.0003 * 9.2740100783e-24 * 0.35 / 6.62607015e-34 * 1e-6;
  const double hand = std::atan2(1.5 * 1475.4, 0.5 * (-4.0 * 1475.4 + f0 * (1.0 + 2.488e-4))) / kPi;
  CHECK(doublet_params(kSiBi, -4, 0.35).theta_m / kPi == doctest::Approx(hand).epsilon(1e-12).scale(0));
  CHECK(hand == doctest::Approx(0.2701).epsilon(1e-3).scale(0));
}

TEST_CASE("Omega_-4 and parameter invariants") {
  CHECK(doublet_params(kSiBi, -4, 0.2).omega_m == doctest::Approx(1.5 * 1475.4).epsilon(1e-14).scale(0));
  CHECK(doublet_params(kSiBi, -4, 0.2).omega_m == doctest::Approx(2213.1).epsilon(1e-12).scale(0));
  for (int m = -4; m <= 4; ++m)
    for (double b : {0.0, 0.05, 0.3, 1.0}) {
      const DoubletParams p = doublet_params(kSiBi, m, b);
      CHECK(p.beta_m * p.beta_m == doctest::Approx(p.delta_m * p.delta_m + p.omega_m * p.omega_m).epsilon(1e-10).scale(0));
      CHECK(p.omega_m >= 0.0);
      CHECK(p.theta_m == doctest::Approx(std::atan2(p.omega_m, p.delta_m)));
    }
  CHECK_THROWS_AS(doublet_params(kSiBi, 5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(doublet_params(kSiBi, -5, 0.1), std::invalid_argument);
}

TEST_CASE("zero-field doublet energies") {
  const double a = kSiBi.hyperfine_mhz;
  for (int m = -4; m <= 4; ++m) {
    const DoubletEnergies e = doublet_energies(doublet_params(kSiBi, m, 0.0));
    CHECK(e.plus == doctest::Approx(2.25 * a).epsilon(1e-13).scale(0));
    CHECK(e.minus == doctest::Approx(-2.75 * a).epsilon(1e-13).scale(0));
  }
  const UnmixedEnergies u = unmixed_energies(kSiBi, 0.0);
  CHECK(u.m_plus == doctest::Approx(3319.65).epsilon(1e-13).scale(0));
  CHECK(u.m_minus == doctest::Approx(3319.65).epsilon(1e-13).scale(0));
}

TEST_CASE("analytic energies match diagonalization on 200 fields") {
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double b = 1e-3 + (1.0 - 1e-3) * k / 199.0;
    const DonorEigensystem es = diagonalize(kSiBi, b);
    for (int m = -4; m <= 4; ++m) {
      const DoubletEnergies e = doublet_energies(doublet_params(kSiBi, m, b));
      worst = std::max(worst, std::abs(e.plus - es.energy(label_of(kSiBi, {m, Branch::plus}))) / std::abs(e.plus));
      worst = std::max(worst, std::abs(e.minus - es.energy(label_of(kSiBi, {m, Branch::minus}))) / std::abs(e.minus));
    }
    const UnmixedEnergies u = unmixed_energies(kSiBi, b);
    worst = std::max(worst, std::abs(u.m_plus - es.energy(20)) / std::abs(u.m_plus));
    worst = std::max(worst, std::abs(u.m_minus - es.energy(10)) / std::abs(u.m_minus));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("unmixed energies at 1 T against a direct formula") {
  const double b = 1.0;
  const double f0 = kSiBi.zeeman_mhz(b), d = kSiBi.nuclear_ratio_delta, a = kSiBi.hyperfine_mhz;
  const UnmixedEnergies u = unmixed_energies(kSiBi, b);
  CHECK(u.m_plus == doctest::Approx(0.5 * f0 - 4.5 * f0 * d + 2.25 * a).epsilon(1e-12).scale(0));
  CHECK(u.m_minus == doctest::Approx(-0.5 * f0 + 4.5 * f0 * d + 2.25 * a).epsilon(1e-12).scale(0));
  CHECK(u.m_plus - u.m_minus == doctest::Approx(f0 * (1 - 9 * d)).epsilon(1e-12).scale(0));
}

TEST_CASE("E+(-4) minus E(10) at 345 mT is the 4.044 GHz line") {
  const UnmixedEnergies u = unmixed_energies(kSiBi, 0.345);
  const DoubletEnergies e = doublet_energies(doublet_params(kSiBi, -4, 0.345));
  CHECK(std::abs(e.plus - u.m_minus - 4044.0) < 12.0);
}

TEST_CASE("doublet states reproduce numeric eigenvectors") {
  for (double b : {0.02, 0.1456, 0.345, 0.9}) {
    const DonorEigensystem es = diagonalize(kSiBi, b);
    for (int m = -4; m <= 4; ++m) {
      const DoubletParams p = doublet_params(kSiBi, m, b);
      for (Branch br : {Branch::plus, Branch::minus}) {
        const DoubletState s = doublet_state(kSiBi, p, br);
        CHECK(s.amplitude_cos * s.amplitude_cos + s.amplitude_sin * s.amplitude_sin == doctest::Approx(1.0).epsilon(1e-12).scale(0));
        const double overlap = std::abs(s.vector(kSiBi).dot(es.state(label_of(kSiBi, {m, br}))));
        CHECK(overlap >= 1.0 - 1e-9);
      }
    }
  }
}

TEST_CASE("Bell fields") {
  const double b1 = bell_field(kSiBi, -1);
  CHECK(b1 == doctest::Approx(bell_field_by_bisection(-1)).epsilon(1e-10).scale(0));
  CHECK(b1 * 1e3 == doctest::Approx(52.7).epsilon(0.05 / 52.7).scale(0));
  CHECK(bell_field(kSiBi, -4) / b1 == doctest::Approx(4.0).epsilon(1e-3).scale(0));
  for (int m = -4; m <= -1; ++m) {
    const double b = bell_field(kSiBi, m);
    CHECK(b == doctest::Approx(bell_field_by_bisection(m)).epsilon(1e-10).scale(0));
    const DoubletParams p = doublet_params(kSiBi, m, b);
    CHECK(p.theta_m == doctest::Approx(kPi / 2).epsilon(1e-12).scale(0));
    const DoubletState s = doublet_state(kSiBi, p, Branch::plus);
    CHECK(s.amplitude_cos == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12).scale(0));
    const DonorEigensystem es = diagonalize(kSiBi, b);
    for (Branch br : {Branch::plus, Branch::minus}) {
      const int label = label_of(kSiBi, {m, br});
      CHECK(std::abs(expectation_sz(es, label)) <= 1e-9);
      CHECK(concurrence(es, label) == doctest::Approx(1.0).epsilon(1e-6).scale(0));
    }
  }
  CHECK_THROWS_AS(bell_field(kSiBi, 0), std::domain_error);
  CHECK_THROWS_AS(bell_field(kSiBi, 2), std::domain_error);
}

TEST_CASE("theta decreases with field and vanishes at high field") {
  for (int m = -4; m <= -1; ++m) {
    double prev = doublet_params(kSiBi, m, 1e-4).theta_m;
    for (int k = 1; k <= 100; ++k) {
      const double t = doublet_params(kSiBi, m, k * 0.01).theta_m;
      CHECK(t < prev);
      prev = t;
    }
    CHECK(doublet_params(kSiBi, m, 100.0).theta_m < 0.01);
  }
}
