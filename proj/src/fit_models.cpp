#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "bispin/fitting.hpp"

namespace bispin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kFourLn2 = 4.0 * std::numbers::ln2;
// area = height * fwhm * sqrt(pi / (4 ln 2))
const double kAreaFactor = std::sqrt(std::numbers::pi / kFourLn2);

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void require_finite(std::span<const double> xs, const char* what) {
  for (double v : xs)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

void require_sizes(std::span<const double> x, std::span<const double> y, std::span<const double> sigma,
                   std::size_t min_points, const char* what) {
  if (x.size() != y.size()) throw std::invalid_argument(std::string(what) + ": x/y size mismatch");
  if (!sigma.empty() && sigma.size() != x.size()) throw std::invalid_argument(std::string(what) + ": sigma size mismatch");
  if (x.size() < min_points) {
    throw std::invalid_argument(std::string(what) + ": need at least " + std::to_string(min_points) + " points");
  }
  require_finite(x, what);
  require_finite(y, what);
}

FitResult to_result(ModelId id, const LeastSquaresProblem& problem, const LevMarOutcome& o) {
  FitResult r;
  r.model = id;
  r.converged = o.converged;
  r.n_iterations = o.iterations;
  r.residual_norm = std::sqrt(2.0 * o.cost);
  for (std::size_t j = 0; j < problem.params.size(); ++j) {
    const ParamSpec& s = problem.params[j];
    FitParam p{s.name, o.params(static_cast<Eigen::Index>(j)), std::nullopt, s.fixed};
    if (o.converged) p.std_error = o.std_errors[j];
    r.params.push_back(p);
    if (!s.fixed && !o.identifiable[j]) r.flags.push_back(s.name + "_unidentifiable");
  }
  const std::span<const double> ps(o.params.data(), static_cast<std::size_t>(o.params.size()));
  r.residuals.resize(static_cast<Eigen::Index>(problem.x.size()));
  for (std::size_t i = 0; i < problem.x.size(); ++i) {
    r.residuals(static_cast<Eigen::Index>(i)) = problem.y[i] - problem.model(problem.x[i], ps);
  }
  return r;
}

// Keeps the lower cost; a converged fit beats a non-converged one.
bool better(const LevMarOutcome& a, const LevMarOutcome& b) {
  if (a.converged != b.converged) return a.converged;
  return a.cost < b.cost;
}

}  // namespace

const FitParam& FitResult::param(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return p;
  throw std::out_of_range("FitResult: no parameter " + std::string(name));
}

bool FitResult::has_flag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

std::string_view model_name(ModelId id) {
  switch (id) {
    case ModelId::echo_decay: return "echo_decay";
    case ModelId::t1_raman_orbach: return "t1_raman_orbach";
    case ModelId::exp_recovery: return "exp_recovery";
    case ModelId::gaussian_lines: return "gaussian_lines";
    case ModelId::linear_baseline: return "linear_baseline";
  }
  return "unknown";
}

std::optional<ModelId> parse_model_id(std::string_view name) {
  for (ModelId id : {ModelId::echo_decay, ModelId::t1_raman_orbach, ModelId::exp_recovery, ModelId::gaussian_lines,
                     ModelId::linear_baseline}) {
    if (model_name(id) == name) return id;
  }
  return std::nullopt;
}

double echo_decay_model(double t_ms, double t2_ms, double ts_ms, double n, double amplitude) {
  return amplitude * std::exp(-t_ms / t2_ms - std::pow(t_ms / ts_ms, n));
}

double t1_rate_model(double temperature_k, double p, double e, double delta_over_kb) {
  return p * std::pow(temperature_k, 7) + e * std::exp(-delta_over_kb / temperature_k);
}

double exp_recovery_model(double t, double t1, double m0, double offset) {
  return m0 * (1.0 - 2.0 * std::exp(-t / t1)) + offset;
}

CurveModel curve_model(ModelId id, int n_lines, SpectrumMode mode) {
  CurveModel m;
  switch (id) {
    case ModelId::echo_decay:
      m.names = {"amplitude", "rate", "TS_ms", "n"};
      m.value = [](double t, std::span<const double> p) {
        return p[0] * std::exp(-p[1] * t - std::pow(t / p[2], p[3]));
      };
      m.gradient = [](double t, std::span<const double> p, std::span<double> g) {
        const double u = t / p[2];
        const double un = t > 0.0 ? std::pow(u, p[3]) : 0.0;
        const double f = p[0] * std::exp(-p[1] * t - un);
        g[0] = f / p[0];
        g[1] = -t * f;
        g[2] = f * un * p[3] / p[2];
        g[3] = t > 0.0 ? -f * un * std::log(u) : 0.0;
      };
      break;
    case ModelId::t1_raman_orbach:
      m.names = {"P", "E", "Delta_over_kB"};
      m.value = [](double x, std::span<const double> p) { return t1_rate_model(x, p[0], p[1], p[2]); };
      m.gradient = [](double x, std::span<const double> p, std::span<double> g) {
        const double boltz = std::exp(-p[2] / x);
        g[0] = std::pow(x, 7);
        g[1] = boltz;
        g[2] = -p[1] * boltz / x;
      };
      break;
    case ModelId::exp_recovery:
      m.names = {"T1", "M0", "offset"};
      m.value = [](double x, std::span<const double> p) { return exp_recovery_model(x, p[0], p[1], p[2]); };
      m.gradient = [](double x, std::span<const double> p, std::span<double> g) {
        const double e = std::exp(-x / p[0]);
        g[0] = -2.0 * p[1] * e * x / (p[0] * p[0]);
        g[1] = 1.0 - 2.0 * e;
        g[2] = 1.0;
      };
      break;
    case ModelId::gaussian_lines: {
      if (n_lines < 1) throw std::invalid_argument("curve_model: n_lines must be >= 1");
      for (int k = 1; k <= n_lines; ++k) {
        const std::string s = std::to_string(k);
        m.names.insert(m.names.end(), {"center_" + s, "fwhm_" + s, "height_" + s});
      }
      const bool deriv = mode == SpectrumMode::derivative;
      m.value = [n_lines, deriv](double x, std::span<const double> p) {
        double sum = 0.0;
        for (int k = 0; k < n_lines; ++k) {
          const double c = p[3 * k], w = p[3 * k + 1], h = p[3 * k + 2];
          const double d = x - c;
          const double g = h * std::exp(-kFourLn2 * d * d / (w * w));
          sum += deriv ? -2.0 * kFourLn2 * d / (w * w) * g : g;
        }
        return sum;
      };
      m.gradient = [n_lines, deriv](double x, std::span<const double> p, std::span<double> grad) {
        for (int k = 0; k < n_lines; ++k) {
          const double c = p[3 * k], w = p[3 * k + 1], h = p[3 * k + 2];
          const double d = x - c;
          const double a = kFourLn2 / (w * w);
          const double e = std::exp(-a * d * d);
          if (!deriv) {
            grad[3 * k] = h * e * 2.0 * a * d;
            grad[3 * k + 1] = h * e * 2.0 * a * d * d / w;
            grad[3 * k + 2] = e;
          } else {
            // y = -2 a d h e
            grad[3 * k] = 2.0 * a * h * e * (1.0 - 2.0 * a * d * d);
            grad[3 * k + 1] = -2.0 * h * e * d * (-2.0 * a / w + a * 2.0 * a * d * d / w);
            grad[3 * k + 2] = -2.0 * a * d * e;
          }
        }
      };
      break;
    }
    case ModelId::linear_baseline:
      m.names = {"intercept", "slope"};
      m.value = [](double x, std::span<const double> p) { return p[0] + p[1] * x; };
      m.gradient = [](double x, std::span<const double>, std::span<double> g) {
        g[0] = 1.0;
        g[1] = x;
      };
      break;
  }
  return m;
}

FitResult fit_echo_decay(const EchoCurve& curve, std::span<const double> sigma) {
  const auto t = as_span(curve.times_ms);
  const auto y = as_span(curve.amplitude);
  require_sizes(t, y, sigma, 6, "fit_echo_decay");
  for (double v : y)
    if (!(v > 0.0)) throw std::invalid_argument("fit_echo_decay: amplitudes must be positive");

  const double amp0 = y[0];
  const double t_max = *std::max_element(t.begin(), t.end());
  // TS from the first 1/e crossing, else a few times the window.
  double ts0 = 3.0 * t_max;
  for (std::size_t k = 1; k < y.size(); ++k) {
    if (y[k] < amp0 / std::numbers::e) {
      ts0 = t[k];
      break;
    }
  }
  if (!(ts0 > 0.0)) ts0 = t_max > 0.0 ? t_max : 1.0;

  const CurveModel model = curve_model(ModelId::echo_decay);
  LeastSquaresProblem problem{t, y, sigma, model.value, {}};
  LevMarOutcome best;
  bool have = false;
  // Stretched-first starts over n, plus one exponential-first start.
  for (double n0 : {1.5, 2.0, 2.5, 3.0, 3.5, 0.0}) {
    const bool exp_first = n0 == 0.0;
    problem.params = {
        {"amplitude", amp0, 0.0, kInf, false, true},
        {"rate", (exp_first ? 1.0 : 0.01) / ts0, 0.0, kInf, false, false},
        {"TS_ms", exp_first ? 10.0 * std::max(t_max, ts0) : ts0, 1e-9 * ts0, 1e6 * std::max(t_max, ts0), false, false},
        {"n", exp_first ? 2.0 : n0, 1.2, 6.0, false, false},
    };
    LevMarOutcome o = levenberg_marquardt(problem);
    if (!have || better(o, best)) {
      best = std::move(o);
      have = true;
    }
  }
  FitResult raw = to_result(ModelId::echo_decay, problem, best);

  // Report T2 = 1/rate.
  FitResult r = raw;
  r.params.clear();
  const FitParam& rate = raw.param("rate");
  FitParam t2{"T2_ms", rate.value > 0.0 ? 1.0 / rate.value : kInf, std::nullopt, false};
  if (rate.std_error && rate.value > 0.0) t2.std_error = *rate.std_error / (rate.value * rate.value);
  if (t2.value > kEffectivelyInfiniteT2Ms) {
    r.flags.push_back("T2_effectively_infinite");
    t2.std_error.reset();
  }
  r.params.push_back(t2);
  r.params.push_back(raw.param("TS_ms"));
  r.params.push_back(raw.param("n"));
  r.params.push_back(raw.param("amplitude"));
  return r;
}

namespace {

// Non-negative least squares for y = P x1 + E x2 (two columns, brute force over active sets).
std::pair<double, double> nonneg_two_column(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                            const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const auto cost = [&](double a, double b) { return (w.cwiseProduct(a * x1 + b * x2 - y)).squaredNorm(); };
  std::vector<std::pair<double, double>> candidates{{0.0, 0.0}};
  const Eigen::VectorXd wx1 = w.cwiseProduct(x1), wx2 = w.cwiseProduct(x2), wy = w.cwiseProduct(y);
  if (wx1.squaredNorm() > 0) candidates.emplace_back(std::max(0.0, wx1.dot(wy) / wx1.squaredNorm()), 0.0);
  if (wx2.squaredNorm() > 0) candidates.emplace_back(0.0, std::max(0.0, wx2.dot(wy) / wx2.squaredNorm()));
  // Columns normalized first; T^7 and exp(-Delta/T) differ by many decades.
  const double n1 = wx1.norm(), n2 = wx2.norm();
  Eigen::Vector2d sol(-1.0, -1.0);
  if (n1 > 0 && n2 > 0) {
    Eigen::MatrixXd a(y.size(), 2);
    a << wx1 / n1, wx2 / n2;
    sol = a.colPivHouseholderQr().solve(wy);
    sol(0) /= n1;
    sol(1) /= n2;
  }
  if (sol.allFinite() && sol(0) >= 0 && sol(1) >= 0) candidates.emplace_back(sol(0), sol(1));
  auto best = candidates.front();
  for (const auto& c : candidates)
    if (cost(c.first, c.second) < cost(best.first, best.second)) best = c;
  return best;
}

}  // namespace

FitResult fit_t1_temperature(std::span<const double> temperature_k, std::span<const double> rate,
                             std::optional<double> delta_fixed_k, std::span<const double> sigma) {
  require_sizes(temperature_k, rate, sigma, 4, "fit_t1_temperature");
  for (double v : temperature_k)
    if (!(v > 0.0)) throw std::invalid_argument("fit_t1_temperature: temperatures must be positive");
  if (delta_fixed_k && !(*delta_fixed_k > 0.0)) throw std::invalid_argument("fit_t1_temperature: Delta must be positive");

  const auto n = static_cast<Eigen::Index>(rate.size());
  Eigen::VectorXd y(n), x1(n), w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    y(i) = rate[k];
    x1(i) = std::pow(temperature_k[k], 7);
    w(i) = sigma.empty() ? 1.0 : 1.0 / sigma[k];
  }

  const CurveModel model = curve_model(ModelId::t1_raman_orbach);
  LeastSquaresProblem problem{temperature_k, rate, sigma, model.value, {}};
  std::vector<double> starts = delta_fixed_k ? std::vector<double>{*delta_fixed_k}
                                             : std::vector<double>{30.0, 60.0, 120.0, 250.0, 500.0};
  LevMarOutcome best;
  bool have = false;
  for (double d0 : starts) {
    Eigen::VectorXd x2(n);
    for (Eigen::Index i = 0; i < n; ++i) x2(i) = std::exp(-d0 / temperature_k[static_cast<std::size_t>(i)]);
    const auto [p0, e0] = nonneg_two_column(x1, x2, y, w);
    problem.params = {
        {"P", p0, 0.0, kInf, false, true},
        {"E", e0, 0.0, kInf, false, false},
        {"Delta_over_kB", d0, 1.0, 1e4, delta_fixed_k.has_value(), false},
    };
    LevMarOutcome o = levenberg_marquardt(problem);
    if (!have || better(o, best)) {
      best = std::move(o);
      have = true;
    }
  }
  return to_result(ModelId::t1_raman_orbach, problem, best);
}

FitResult fit_exp_recovery(std::span<const double> t, std::span<const double> m, std::span<const double> sigma) {
  require_sizes(t, m, sigma, 4, "fit_exp_recovery");
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t[a] < t[b]; });
  const double first = m[order.front()], last = m[order.back()];
  const double m0 = 0.5 * (last - first);
  const double offset = 0.5 * (last + first);
  // Zero crossing of 1 - 2 exp(-t/T1) sits at T1 ln 2.
  const double t_span = t[order.back()] - t[order.front()];
  double t1 = t_span > 0.0 ? t_span / 5.0 : 1.0;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double a = m[order[k - 1]] - offset, b = m[order[k]] - offset;
    if (a * b <= 0.0 && a != b) {
      const double tc = t[order[k - 1]] + (t[order[k]] - t[order[k - 1]]) * a / (a - b);
      if (tc > 0.0) t1 = tc / std::numbers::ln2;
      break;
    }
  }

  const CurveModel model = curve_model(ModelId::exp_recovery);
  LeastSquaresProblem problem{t, m, sigma, model.value,
                              {{"T1", t1, 1e-12 * std::max(t1, 1.0), kInf, false, true},
                               {"M0", m0, -kInf, kInf, false, false},
                               {"offset", offset, -kInf, kInf, false, false}}};
  return to_result(ModelId::exp_recovery, problem, levenberg_marquardt(problem));
}

FitResult fit_linear_baseline(std::span<const double> x, std::span<const double> y, std::span<const double> sigma) {
  require_sizes(x, y, sigma, 3, "fit_linear_baseline");
  const CurveModel model = curve_model(ModelId::linear_baseline);
  const double slope0 = (y.back() - y.front()) / (x.back() - x.front() != 0.0 ? x.back() - x.front() : 1.0);
  LeastSquaresProblem problem{x, y, sigma, model.value,
                              {{"intercept", y.front() - slope0 * x.front(), -kInf, kInf, false, true},
                               {"slope", slope0, -kInf, kInf, false, true}}};
  return to_result(ModelId::linear_baseline, problem, levenberg_marquardt(problem));
}

FitResult fit_gaussian_lines(const SpectrumCurve& spectrum, int n_lines, SpectrumMode mode) {
  if (n_lines < 1) throw std::invalid_argument("fit_gaussian_lines: n_lines must be >= 1");
  const Eigen::Index n = spectrum.field.size();
  if (spectrum.signal.size() != n) throw std::invalid_argument("fit_gaussian_lines: size mismatch");
  if (n < 3 * n_lines + 1) throw std::invalid_argument("fit_gaussian_lines: too few points");
  require_finite(as_span(spectrum.field), "fit_gaussian_lines");
  require_finite(as_span(spectrum.signal), "fit_gaussian_lines");

  const bool deriv = mode == SpectrumMode::derivative;
  // Work in mT; a derivative signal per tesla becomes per mT.
  const Eigen::VectorXd x = spectrum.field * 1e3;
  const Eigen::VectorXd y = deriv ? Eigen::VectorXd(spectrum.signal * 1e-3) : spectrum.signal;
  for (Eigen::Index i = 1; i < n; ++i)
    if (!(x(i) > x(i - 1))) throw std::invalid_argument("fit_gaussian_lines: field must be ascending");

  // Absorption profile for the initial guesses.
  Eigen::VectorXd absorption = y;
  if (deriv) {
    absorption(0) = 0.0;
    for (Eigen::Index i = 1; i < n; ++i) absorption(i) = absorption(i - 1) + 0.5 * (y(i) + y(i - 1)) * (x(i) - x(i - 1));
  }

  std::vector<Eigen::Index> maxima;
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    if (absorption(i) >= absorption(i - 1) && absorption(i) > absorption(i + 1)) maxima.push_back(i);
  if (maxima.empty()) maxima.push_back(0);
  std::sort(maxima.begin(), maxima.end(), [&](auto a, auto b) { return absorption(a) > absorption(b); });

  const double step = (x(n - 1) - x(0)) / static_cast<double>(n - 1);
  std::vector<ParamSpec> params;
  std::vector<double> centers;
  for (int k = 0; k < n_lines; ++k) {
    const std::string s = std::to_string(k + 1);
    Eigen::Index peak = maxima[static_cast<std::size_t>(k) % maxima.size()];
    const double h = std::max(absorption(peak), 0.0);
    // Half-maximum walk on each side.
    Eigen::Index lo = peak, hi = peak;
    while (lo > 0 && absorption(lo) > 0.5 * h) --lo;
    while (hi + 1 < n && absorption(hi) > 0.5 * h) ++hi;
    double w = std::max(x(hi) - x(lo), 2.0 * step);
    double c = x(peak);
    if (k >= static_cast<int>(maxima.size())) c += (k + 1) * w;  // spread surplus lines
    centers.push_back(c);
    params.push_back({"center_" + s, c, x(0), x(n - 1), false, true});
    params.push_back({"fwhm_" + s, w, 1e-3 * step, x(n - 1) - x(0), false, true});
    params.push_back({"height_" + s, h > 0.0 ? h : 1e-12, 0.0, kInf, false, false});
  }

  const CurveModel model = curve_model(ModelId::gaussian_lines, n_lines, mode);
  LeastSquaresProblem problem{as_span(x), as_span(y), {}, model.value, std::move(params)};
  const LevMarOutcome o = levenberg_marquardt(problem);
  FitResult r = to_result(ModelId::gaussian_lines, problem, o);
  // Residuals back in the caller's signal units.
  if (deriv) r.residuals *= 1e3;

  // Area per line from height and fwhm, delta-method error.
  for (int k = 0; k < n_lines; ++k) {
    const double w = o.params(3 * k + 1), h = o.params(3 * k + 2);
    FitParam area{"area_" + std::to_string(k + 1), h * w * kAreaFactor, std::nullopt, false};
    if (o.converged && o.covariance.size() > 0) {
      // Free-index positions equal parameter positions (nothing fixed).
      const double vw = o.covariance(3 * k + 1, 3 * k + 1), vh = o.covariance(3 * k + 2, 3 * k + 2);
      const double cwh = o.covariance(3 * k + 1, 3 * k + 2);
      const double var = kAreaFactor * kAreaFactor * (h * h * vw + w * w * vh + 2.0 * h * w * cwh);
      area.std_error = std::sqrt(std::max(0.0, var));
    }
    r.params.push_back(area);
  }
  return r;
}

SpectrumCurve subtract_linear_baseline(const SpectrumCurve& curve, std::span<const FieldWindow> windows) {
  if (curve.field.size() != curve.signal.size()) throw std::invalid_argument("subtract_linear_baseline: size mismatch");
  if (curve.field.size() < 3) throw std::invalid_argument("subtract_linear_baseline: need at least 3 points");
  if (windows.empty()) throw std::invalid_argument("subtract_linear_baseline: no baseline windows");
  std::vector<Eigen::Index> inside;
  for (Eigen::Index i = 0; i < curve.field.size(); ++i) {
    for (const auto& [lo, hi] : windows) {
      if (curve.field(i) >= std::min(lo, hi) && curve.field(i) <= std::max(lo, hi)) {
        inside.push_back(i);
        break;
      }
    }
  }
  if (inside.size() < 2) throw std::invalid_argument("subtract_linear_baseline: fewer than 2 points in the windows");

  // Centred closed-form line through the window points.
  double mx = 0.0, my = 0.0;
  for (auto i : inside) {
    mx += curve.field(i);
    my += curve.signal(i);
  }
  mx /= static_cast<double>(inside.size());
  my /= static_cast<double>(inside.size());
  double sxx = 0.0, sxy = 0.0;
  for (auto i : inside) {
    sxx += (curve.field(i) - mx) * (curve.field(i) - mx);
    sxy += (curve.field(i) - mx) * (curve.signal(i) - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;

  SpectrumCurve out = curve;
  out.signal = curve.signal - (Eigen::VectorXd::Constant(curve.field.size(), my) + slope * (curve.field.array() - mx).matrix());
  return out;
}

std::optional<double> rabi_peak(std::span<const double> t_us, std::span<const double> amplitude) {
  if (t_us.size() != amplitude.size()) throw std::invalid_argument("rabi_peak: size mismatch");
  if (t_us.size() < 16) throw std::invalid_argument("rabi_peak: need at least 16 points");
  require_finite(t_us, "rabi_peak");
  require_finite(amplitude, "rabi_peak");
  const std::size_t n = t_us.size();
  const double dt = (t_us.back() - t_us.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) throw std::invalid_argument("rabi_peak: time must be ascending");
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs((t_us[k] - t_us[k - 1]) - dt) > 1e-6 * dt) throw std::invalid_argument("rabi_peak: non-uniform sampling");
  }

  const double mean = std::accumulate(amplitude.begin(), amplitude.end(), 0.0) / static_cast<double>(n);
  std::vector<double> padded(4 * n, 0.0);
  double spread = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    padded[k] = amplitude[k] - mean;
    spread = std::max(spread, std::abs(padded[k]));
    scale = std::max(scale, std::abs(amplitude[k]));
  }
  if (spread <= 1e-12 * std::max(scale, 1e-300)) return std::nullopt;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  const std::size_t m = padded.size();
  std::size_t peak = 1;
  for (std::size_t k = 1; k < m / 2; ++k)
    if (std::abs(spectrum[k]) > std::abs(spectrum[peak])) peak = k;

  double offset = 0.0;
  if (peak + 1 < m / 2) {
    const double a = std::abs(spectrum[peak - 1]), b = std::abs(spectrum[peak]), c = std::abs(spectrum[peak + 1]);
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) offset = 0.5 * (a - c) / denom;
  }
  return (static_cast<double>(peak) + offset) / (static_cast<double>(m) * dt);
}

}  // namespace bispin
