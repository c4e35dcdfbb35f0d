#include "bispin/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bispin {

namespace {

constexpr double kScanStepTesla = 5e-4;
constexpr double kRootTolTesla = 1e-9;

void check_pair(const SpinSystem& sys, int i, int j) {
  if (i == j) throw std::invalid_argument("transition: labels must differ");
  if (i < 1 || j < 1 || i > sys.dimension() || j > sys.dimension()) {
    throw std::invalid_argument("transition: label out of range");
  }
}

double bisect(const auto& g, double lo, double hi, double g_lo) {
  while (hi - lo > kRootTolTesla) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = g(mid);
    if (g_mid == 0.0) return mid;
    if ((g_mid > 0) == (g_lo > 0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Extremum of f on [lo, hi] by golden-section search; maximize selects the sense.
double golden_extremum(const auto& f, double lo, double hi, bool maximize) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double sign = maximize ? -1.0 : 1.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = sign * f(c), fd = sign * f(d);
  while (b - a > kRootTolTesla) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = sign * f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = sign * f(d);
    }
  }
  return 0.5 * (a + b);
}

Eigen::VectorXd scan_grid(double b_min, double b_max) {
  const int n = static_cast<int>(std::floor((b_max - b_min) / kScanStepTesla + 1e-9));
  std::vector<double> pts;
  for (int k = 0; k <= n; ++k) pts.push_back(b_min + k * kScanStepTesla);
  if (b_max - pts.back() > 1e-12) pts.push_back(b_max);
  return Eigen::Map<Eigen::VectorXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
}

// Roots of g on sampled nodes (b, gv); extrema between nodes are probed first.
std::vector<double> roots_from_samples(const auto& g, std::vector<double> b, std::vector<double> gv) {
  // Insert turning points so tangent/double roots between nodes are bracketed.
  std::vector<std::pair<double, double>> extra;
  for (std::size_t k = 1; k + 1 < b.size(); ++k) {
    const double left = gv[k] - gv[k - 1];
    const double right = gv[k + 1] - gv[k];
    if (left * right < 0.0) {
      const double be = golden_extremum(g, b[k - 1], b[k + 1], left > 0.0);
      extra.emplace_back(be, g(be));
    }
  }
  std::vector<std::pair<double, double>> nodes;
  for (std::size_t k = 0; k < b.size(); ++k) nodes.emplace_back(b[k], gv[k]);
  nodes.insert(nodes.end(), extra.begin(), extra.end());
  std::sort(nodes.begin(), nodes.end());

  std::vector<double> roots;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const auto [bk, gk] = nodes[k];
    if (std::abs(gk) < 1e-9) {
      roots.push_back(bk);
      continue;
    }
    if (k + 1 < nodes.size()) {
      const double gn = nodes[k + 1].second;
      if (std::abs(gn) >= 1e-9 && (gk > 0) != (gn > 0)) {
        roots.push_back(bisect(g, bk, nodes[k + 1].first, gk));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(), [](double x, double y) { return std::abs(x - y) < 1e-7; }),
              roots.end());
  return roots;
}

}  // namespace

std::vector<std::pair<int, int>> adjacent_doublet_pairs(const SpinSystem& sys) {
  std::vector<std::pair<int, int>> pairs;
  const int dim = sys.dimension();
  for (int i = 1; i <= dim; ++i) {
    for (int j = i + 1; j <= dim; ++j) {
      if (std::abs(doublet_of(sys, i).m - doublet_of(sys, j).m) == 1) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

double transition_frequency(const DonorEigensystem& es, int i, int j) {
  return std::abs(es.energy(i) - es.energy(j));
}

double transition_frequency(const SpinSystem& sys, int i, int j, double b_tesla) {
  check_pair(sys, i, j);
  return transition_frequency(diagonalize(sys, b_tesla), i, j);
}

double sx_matrix_element(const DonorEigensystem& es, int i, int j) {
  // Sx (x) 1 couples |+1/2, m_I> (row k) and |-1/2, m_I> (row k + n) with weight 1/2.
  const Eigen::VectorXcd u = es.state(i);
  const Eigen::VectorXcd l = es.state(j);
  const Eigen::Index n = u.size() / 2;
  const std::complex<double> elem =
      0.5 * (u.head(n).dot(l.tail(n)) + u.tail(n).dot(l.head(n)));
  return std::abs(elem);
}

double sx_matrix_element(const SpinSystem& sys, int i, int j, double b_tesla) {
  check_pair(sys, i, j);
  return sx_matrix_element(diagonalize(sys, b_tesla), i, j);
}

std::vector<double> resonance_fields(const SpinSystem& sys, int i, int j, double f_target_mhz, double b_min,
                                     double b_max) {
  check_pair(sys, i, j);
  if (!(b_max > b_min) || b_min < 0.0) throw std::invalid_argument("resonance_fields: bad field range");
  if (!(f_target_mhz > 0.0)) throw std::invalid_argument("resonance_fields: f_target must be positive");
  const auto g = [&](double b) { return transition_frequency(sys, i, j, b) - f_target_mhz; };
  const Eigen::VectorXd grid = scan_grid(b_min, b_max);
  std::vector<double> b(grid.begin(), grid.end());
  std::vector<double> gv;
  gv.reserve(b.size());
  for (double x : b) gv.push_back(g(x));
  return roots_from_samples(g, std::move(b), std::move(gv));
}

Transition make_transition(const SpinSystem& sys, int i, int j, double b_tesla) {
  check_pair(sys, i, j);
  const DonorEigensystem es = diagonalize(sys, b_tesla);
  Transition t;
  const bool i_upper = es.energy(i) >= es.energy(j);
  t.label_upper = i_upper ? i : j;
  t.label_lower = i_upper ? j : i;
  t.field_b = b_tesla;
  t.frequency_mhz = transition_frequency(es, i, j);
  t.sx_element = sx_matrix_element(es, i, j);
  t.intensity = t.sx_element * t.sx_element;
  t.dfdb_mhz_per_mt = b_tesla > kDfDbStepTesla ? df_db(sys, i, j, b_tesla) : 0.0;
  return t;
}

std::vector<Transition> find_all_resonances(const SpinSystem& sys, double f_target_mhz, double b_min,
                                            double b_max, double intensity_floor) {
  if (intensity_floor < 0.0) throw std::invalid_argument("find_all_resonances: floor must be >= 0");
  if (!(b_max > b_min) || b_min < 0.0) throw std::invalid_argument("find_all_resonances: bad field range");
  if (!(f_target_mhz > 0.0)) throw std::invalid_argument("find_all_resonances: f_target must be positive");

  const Eigen::VectorXd grid = scan_grid(b_min, b_max);
  std::vector<DonorEigensystem> cache;
  cache.reserve(grid.size());
  for (double b : grid) cache.push_back(diagonalize(sys, b));

  std::vector<Transition> out;
  for (const auto& [i, j] : adjacent_doublet_pairs(sys)) {
    std::vector<double> b(grid.begin(), grid.end());
    std::vector<double> gv;
    gv.reserve(cache.size());
    for (const auto& es : cache) gv.push_back(transition_frequency(es, i, j) - f_target_mhz);
    const auto g = [&, i = i, j = j](double x) { return transition_frequency(sys, i, j, x) - f_target_mhz; };
    for (double root : roots_from_samples(g, std::move(b), std::move(gv))) {
      Transition t = make_transition(sys, i, j, root);
      if (t.intensity > intensity_floor) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) { return a.field_b < b.field_b; });
  return out;
}

double rabi_frequency(const SpinSystem& sys, int i, int j, double b_tesla, double f1_mhz) {
  if (!(f1_mhz > 0.0)) throw std::invalid_argument("rabi_frequency: f1 must be positive");
  return 2.0 * f1_mhz * sx_matrix_element(sys, i, j, b_tesla);
}

double df_db(const SpinSystem& sys, int i, int j, double b_tesla) {
  if (!(b_tesla > kDfDbStepTesla)) throw std::invalid_argument("df_db: B must exceed the difference step");
  const double up = transition_frequency(sys, i, j, b_tesla + kDfDbStepTesla);
  const double down = transition_frequency(sys, i, j, b_tesla - kDfDbStepTesla);
  return (up - down) / (2.0 * kDfDbStepTesla * 1e3);
}

SpectrumCurve synthesize_spectrum(std::span<const Transition> lines, double fwhm_mt, SpectrumMode mode,
                                  const Eigen::VectorXd& field_grid) {
  if (!(fwhm_mt > 0.0)) throw std::invalid_argument("synthesize_spectrum: fwhm must be positive");
  const double sigma = fwhm_mt * 1e-3 / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));

  SpectrumCurve curve;
  curve.field = field_grid;
  curve.mode = mode;
  curve.signal = Eigen::VectorXd::Zero(field_grid.size());
  for (const Transition& t : lines) {
    const Eigen::ArrayXd x = field_grid.array() - t.field_b;
    const Eigen::ArrayXd gauss = t.intensity * norm * (-x.square() / (2.0 * sigma * sigma)).exp();
    if (mode == SpectrumMode::absorption) {
      curve.signal.array() += gauss;
    } else {
      curve.signal.array() += -x / (sigma * sigma) * gauss;
    }
  }
  return curve;
}

std::vector<MapPoint> frequency_field_map(const SpinSystem& sys, const Eigen::VectorXd& field_grid,
                                          double intensity_floor) {
  for (Eigen::Index k = 1; k < field_grid.size(); ++k) {
    if (!(field_grid(k) > field_grid(k - 1))) throw std::invalid_argument("frequency_field_map: grid not ascending");
  }
  const auto pairs = adjacent_doublet_pairs(sys);
  std::vector<MapPoint> out;
  for (double b : field_grid) {
    const DonorEigensystem es = diagonalize(sys, b);
    for (const auto& [i, j] : pairs) {
      const double sx = sx_matrix_element(es, i, j);
      if (sx * sx <= intensity_floor) continue;
      const bool i_upper = es.energy(i) >= es.energy(j);
      out.push_back({b, i_upper ? i : j, i_upper ? j : i, transition_frequency(es, i, j), sx * sx});
    }
  }
  return out;
}

}  // namespace bispin
