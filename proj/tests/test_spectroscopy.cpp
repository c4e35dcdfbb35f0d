#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "bispin/doublet.hpp"
#include "bispin/spectroscopy.hpp"

using namespace bispin;

namespace {

const SpinSystem kSiBi = SpinSystem::si_bi();

double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  double s = 0.0;
  for (Eigen::Index k = 1; k < x.size(); ++k) s += 0.5 * (y(k) + y(k - 1)) * (x(k) - x(k - 1));
  return s;
}

const Transition& find_line(const std::vector<Transition>& lines, int u, int l) {
  const auto it = std::find_if(lines.begin(), lines.end(), [&](const Transition& t) { return t.label_upper == u && t.label_lower == l; });
  REQUIRE(it != lines.end());
  return *it;
}

}  // namespace

TEST_CASE("transition frequencies at the 4.044 GHz resonance fields") {
  CHECK(std::abs(transition_frequency(kSiBi, 11, 10, 0.3450) - 4044.0) < 12.0);
  CHECK(std::abs(transition_frequency(kSiBi, 10, 9, 0.1456) - 4044.0) < 12.0);
  // Labels 10 and 20 both sit in the F = 5 multiplet at zero field; 5 = |-,0> is in F = 4.
  CHECK(transition_frequency(kSiBi, 20, 10, 0.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(std::abs(transition_frequency(kSiBi, 10, 5, 0.0)) == doctest::Approx(5 * 1475.4).epsilon(1e-12).scale(0));
  CHECK_THROWS(transition_frequency(kSiBi, 10, 10, 0.1));
  CHECK_THROWS(transition_frequency(kSiBi, 0, 10, 0.1));
}

TEST_CASE("resonance_fields for single transitions") {
  const auto r109 = resonance_fields(kSiBi, 10, 9, 4044.0, 0.0, 0.6);
  REQUIRE(r109.size() == 1);
  CHECK(r109[0] * 1e3 == doctest::Approx(145.6).epsilon(0.5 / 145.6).scale(0));
  const auto r1110 = resonance_fields(kSiBi, 11, 10, 4044.0, 0.0, 0.6);
  REQUIRE(r1110.size() == 1);
  CHECK(r1110[0] * 1e3 == doctest::Approx(345.0).epsilon(0.5 / 345.0).scale(0));
  CHECK(std::abs(transition_frequency(kSiBi, 11, 10, r1110[0]) - 4044.0) < 1e-3);
  CHECK(resonance_fields(kSiBi, 11, 10, 1e9, 0.0, 1.0).empty());
}

TEST_CASE("root completeness on a 0.05 mT grid") {
  const double f = 4044.0;
  for (const auto& [i, j] : adjacent_doublet_pairs(kSiBi)) {
    const auto roots = resonance_fields(kSiBi, i, j, f, 0.0, 0.6);
    double prev = transition_frequency(kSiBi, i, j, 0.0) - f;
    for (int k = 1; k <= 12000; ++k) {
      const double b = k * 5e-5;
      const double cur = transition_frequency(kSiBi, i, j, b) - f;
      if (prev * cur < 0.0) {
        const bool covered = std::any_of(roots.begin(), roots.end(), [&](double r) { return std::abs(r - b) < 1e-3; });
        CHECK_MESSAGE(covered, "unreported root for " << i << "-" << j << " near " << b);
      }
      prev = cur;
    }
  }
}

TEST_CASE("find_all_resonances counts") {
  const auto at4 = find_all_resonances(kSiBi, 4044.0, 0.0, 1.0);
  REQUIRE(at4.size() == 2);
  CHECK(at4[0].label_upper == 10);
  CHECK(at4[0].label_lower == 9);
  CHECK(at4[1].label_upper == 11);
  CHECK(at4[1].label_lower == 10);
  CHECK(find_all_resonances(kSiBi, 9700.0, 0.0, 1.0).size() == 10);
  CHECK(find_all_resonances(kSiBi, 4044.0, 0.0, 1.0, 0.5).empty());
  // A floor of 1e-4 also admits weak lines between the (-,m) and (+,m-1) branches.
  const auto loose = find_all_resonances(kSiBi, 9700.0, 0.0, 1.0, 1e-4);
  CHECK(loose.size() == 18);
  int weak = 0;
  for (const auto& t : loose) {
    CHECK(t.intensity > 0.0);
    CHECK(t.intensity <= 0.25);
    if (t.intensity < 0.01) ++weak;
  }
  CHECK(weak == 8);
}

TEST_CASE("transition strengths") {
  const double r = sx_matrix_element(kSiBi, 11, 10, 0.3450) / sx_matrix_element(kSiBi, 10, 9, 0.1456);
  CHECK(r == doctest::Approx(1.1).epsilon(0.03 / 1.1).scale(0));
  CHECK(sx_matrix_element(kSiBi, 11, 10, 6.0) == doctest::Approx(0.5).epsilon(0.002).scale(0));
  CHECK(sx_matrix_element(kSiBi, 10, 9, 6.0) < 0.01);
  for (double b : {0.05, 0.2, 0.7})
    for (const auto& [i, j] : adjacent_doublet_pairs(kSiBi)) {
      CHECK(sx_matrix_element(kSiBi, i, j, b) == doctest::Approx(sx_matrix_element(kSiBi, j, i, b)).epsilon(1e-14).scale(0));
    }
  // Not adjacent: no Sx coupling.
  CHECK(sx_matrix_element(kSiBi, 10, 12, 0.3) < 1e-14);
}

TEST_CASE("Rabi frequencies") {
  const double b_hi = resonance_fields(kSiBi, 11, 10, 4044.0, 0.0, 0.6).at(0);
  const double b_lo = resonance_fields(kSiBi, 10, 9, 4044.0, 0.0, 0.6).at(0);
  CHECK(rabi_frequency(kSiBi, 11, 10, b_hi, 5.0) / rabi_frequency(kSiBi, 10, 9, b_lo, 5.0) ==
        doctest::Approx(1.1).epsilon(0.03 / 1.1).scale(0));
  const double f1 = 1.0 / (2.0 * 0.032) / (2.0 * sx_matrix_element(kSiBi, 11, 10, b_hi));
  CHECK(rabi_frequency(kSiBi, 11, 10, b_hi, f1) == doctest::Approx(15.625).epsilon(1e-12).scale(0));
  CHECK(rabi_frequency(kSiBi, 10, 12, 0.3, f1) < 1e-12);
}

TEST_CASE("df/dB") {
  CHECK(df_db(kSiBi, 11, 10, 6.0) == doctest::Approx(28.0).epsilon(0.05 / 28.0).scale(0));
  // Oracle: closed-form doublet energies, fine central difference.
  auto energy = [](int label, double b) {
    const DoubletId id = doublet_of(kSiBi, label);
    if (std::abs(id.m) > kSiBi.max_doublet_m()) {
      const UnmixedEnergies u = unmixed_energies(kSiBi, b);
      return id.m > 0 ? u.m_plus : u.m_minus;
    }
    const DoubletEnergies d = doublet_energies(doublet_params(kSiBi, id.m, b));
    return id.branch == Branch::plus ? d.plus : d.minus;
  };
  auto oracle = [&](int i, int j, double b) {
    const double h = 1e-7;
    auto f = [&](double x) { return std::abs(energy(i, x) - energy(j, x)); };
    return (f(b + h) - f(b - h)) / (2.0 * h) * 1e-3;
  };
  const double g1 = df_db(kSiBi, 10, 9, 0.1456), g2 = df_db(kSiBi, 11, 10, 0.3450);
  CHECK(g1 == doctest::Approx(oracle(10, 9, 0.1456)).epsilon(1e-6).scale(0));
  CHECK(g2 == doctest::Approx(oracle(11, 10, 0.3450)).epsilon(1e-6).scale(0));
  // 10-9 has the smaller gradient magnitude of the two 4 GHz lines.
  CHECK(std::abs(g1) < std::abs(g2));
  const Transition t = make_transition(kSiBi, 11, 10, 0.3450);
  CHECK(t.dfdb_mhz_per_mt == doctest::Approx(g2).epsilon(1e-12).scale(0));
}

TEST_CASE("df/dB vanishes at a turning point of f(B)") {
  int found = 0;
  for (const auto& [i, j] : adjacent_doublet_pairs(kSiBi)) {
    for (int k = 1; k + 1 < 1000; ++k) {
      const double b0 = k * 1e-3;
      const double fm = transition_frequency(kSiBi, i, j, b0 - 1e-3), fc = transition_frequency(kSiBi, i, j, b0),
                   fp = transition_frequency(kSiBi, i, j, b0 + 1e-3);
      if ((fc - fm) * (fp - fc) >= 0.0) continue;
      // Golden-section search on +-f for the extremum.
      const double sign = fc > fm ? -1.0 : 1.0;
      double a = b0 - 1e-3, c = b0 + 1e-3;
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      for (int it = 0; it < 80; ++it) {
        const double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
        if (sign * transition_frequency(kSiBi, i, j, x1) < sign * transition_frequency(kSiBi, i, j, x2)) c = x2;
        else a = x1;
      }
      const double b_ext = 0.5 * (a + c);
      if (b_ext <= 2e-4) continue;
      CHECK(std::abs(df_db(kSiBi, i, j, b_ext)) < 0.01);
      ++found;
    }
  }
  CHECK(found > 0);
}

TEST_CASE("synthesized spectrum: areas, derivative, linearity") {
  const auto lines = find_all_resonances(kSiBi, 4044.0, 0.0, 1.0);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(200001, 0.10, 0.40);
  const SpectrumCurve abs = synthesize_spectrum(lines, 0.7, SpectrumMode::absorption, grid);
  const SpectrumCurve der = synthesize_spectrum(lines, 0.7, SpectrumMode::derivative, grid);
  const Eigen::Index mid = 100000;  // 0.25 T, between the lines
  const double area_lo = trapezoid(grid.head(mid), abs.signal.head(mid));
  const double area_hi = trapezoid(grid.tail(grid.size() - mid), abs.signal.tail(grid.size() - mid));
  CHECK(area_hi / area_lo == doctest::Approx(1.2).epsilon(0.05 / 1.2).scale(0));
  CHECK(area_lo == doctest::Approx(find_line(lines, 10, 9).intensity).epsilon(1e-6).scale(0));

  // Cumulative trapezoid of the derivative recovers the absorption.
  Eigen::VectorXd integral(grid.size());
  integral(0) = abs.signal(0);
  for (Eigen::Index k = 1; k < grid.size(); ++k) integral(k) = integral(k - 1) + 0.5 * (der.signal(k) + der.signal(k - 1)) * (grid(k) - grid(k - 1));
  // Trapezoid error is about (h / sigma)^2 / 12 of the peak, ~2e-6 here.
  CHECK((integral - abs.signal).cwiseAbs().maxCoeff() <= 1e-5 * abs.signal.cwiseAbs().maxCoeff());

  const SpectrumCurve one = synthesize_spectrum(std::span(lines).first(1), 0.7, SpectrumMode::derivative, grid);
  const SpectrumCurve two = synthesize_spectrum(std::span(lines).last(1), 0.7, SpectrumMode::derivative, grid);
  CHECK((one.signal + two.signal - der.signal).cwiseAbs().maxCoeff() <= 1e-12 * der.signal.cwiseAbs().maxCoeff());

  const SpectrumCurve empty = synthesize_spectrum({}, 0.7, SpectrumMode::absorption, grid);
  CHECK(empty.signal.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("frequency-field map") {
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(301, 0.0, 1.5);
  const auto map = frequency_field_map(kSiBi, grid, 1e-4);
  const std::size_t n_pairs = adjacent_doublet_pairs(kSiBi).size();
  CHECK(n_pairs == 36);
  for (double b : grid) {
    const auto n = std::count_if(map.begin(), map.end(), [&](const MapPoint& p) { return p.field_b == b; });
    CHECK(n >= 1);
    CHECK(n <= static_cast<long>(n_pairs));
  }
  // Above 1 T only the ten high-field-allowed lines clear the default floor.
  const Eigen::VectorXd high = Eigen::VectorXd::LinSpaced(51, 1.0, 1.5);
  const auto allowed = frequency_field_map(kSiBi, high);
  for (double b : high) {
    const auto n = std::count_if(allowed.begin(), allowed.end(), [&](const MapPoint& p) { return p.field_b == b; });
    CHECK(n == 10);
  }
  for (const auto& p : map) {
    if (p.field_b != 0.0) continue;
    const bool zero = std::abs(p.frequency_mhz) < 1e-6, split = std::abs(p.frequency_mhz - 7377.0) < 1e-6;
    CHECK((zero || split));
  }

  const auto dense = frequency_field_map(kSiBi, Eigen::VectorXd::LinSpaced(1001, 0.0, 1.0));
  std::set<std::pair<int, int>> branches;
  for (const auto& p : dense)
    if (p.frequency_mhz > 7400.0) branches.insert({p.label_upper, p.label_lower});
  CHECK(branches.size() == 10);
}
