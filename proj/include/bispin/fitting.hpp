#ifndef BISPIN_FITTING_HPP
#define BISPIN_FITTING_HPP

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bispin/cce.hpp"
#include "bispin/spectroscopy.hpp"

namespace bispin {

// ---------------------------------------------------------------------------
// Damped least squares
// ---------------------------------------------------------------------------

struct ParamSpec {
  std::string name;
  double init = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool fixed = false;
  /// Essential parameters must be identifiable for the fit to count as converged.
  bool essential = false;
};

using ModelFn = std::function<double(double x, std::span<const double> params)>;

struct LeastSquaresProblem {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> sigma;  // empty: unit weights
  ModelFn model;
  std::vector<ParamSpec> params;
};

struct LevMarOptions {
  int max_iterations = 500;
  double step_tol = 1e-10;
  double cost_tol = 1e-12;
};

struct LevMarOutcome {
  Eigen::VectorXd params;                      // all parameters, fixed ones included
  std::vector<std::optional<double>> std_errors;
  std::vector<bool> identifiable;
  double cost = 0.0;                           // 0.5 * sum r^2
  bool converged = false;
  int iterations = 0;
  std::vector<double> accepted_costs;          // cost after each accepted step, starting point first
  Eigen::MatrixXd covariance;                  // free-parameter block, scaled by reduced chi^2
  std::vector<int> free_index;
};

/// Marquardt-scaled Levenberg iteration with central-difference Jacobian,
/// parameters projected onto their bounds. Never accepts a cost increase.
LevMarOutcome levenberg_marquardt(const LeastSquaresProblem& problem, const LevMarOptions& options = {});

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

enum class ModelId { echo_decay, t1_raman_orbach, exp_recovery, gaussian_lines, linear_baseline };

std::string_view model_name(ModelId id);
std::optional<ModelId> parse_model_id(std::string_view name);

/// Value and analytic gradient for one model instance.
struct CurveModel {
  std::vector<std::string> names;
  ModelFn value;
  std::function<void(double x, std::span<const double> params, std::span<double> grad)> gradient;
};

/// echo: (amplitude, rate 1/ms, TS ms, n) -> amplitude exp(-rate t - (t/TS)^n)
/// t1: (P, E, Delta/kB) -> P T^7 + E exp(-Delta/(kB T))
/// exp_recovery: (T1, M0, offset) -> M0 (1 - 2 exp(-t/T1)) + offset
/// gaussian_lines: per line (center mT, fwhm mT, height), absorption or d/dB
/// linear_baseline: (intercept, slope)
CurveModel curve_model(ModelId id, int n_lines = 1, SpectrumMode mode = SpectrumMode::absorption);

double echo_decay_model(double t_ms, double t2_ms, double ts_ms, double n, double amplitude = 1.0);
double t1_rate_model(double temperature_k, double p, double e, double delta_over_kb);
double exp_recovery_model(double t, double t1, double m0, double offset);

// ---------------------------------------------------------------------------
// Fits
// ---------------------------------------------------------------------------

struct FitParam {
  std::string name;
  double value = 0.0;
  std::optional<double> std_error;
  bool fixed = false;
};

struct FitResult {
  ModelId model = ModelId::echo_decay;
  std::vector<FitParam> params;
  double residual_norm = 0.0;
  bool converged = false;
  int n_iterations = 0;
  std::vector<std::string> flags;
  Eigen::VectorXd residuals;

  const FitParam& param(std::string_view name) const;
  double value(std::string_view name) const { return param(name).value; }
  bool has_flag(std::string_view flag) const;
};

/// Echo T2 above this is reported as effectively infinite (1e3 s).
inline constexpr double kEffectivelyInfiniteT2Ms = 1e6;

/// exp(-t/T2 - (t/TS)^n) with a free overall amplitude; multi-start over n.
FitResult fit_echo_decay(const EchoCurve& curve, std::span<const double> sigma = {});

/// 1/T1 = P T^7 + E exp(-Delta/(kB T)); Delta/kB held fixed when given.
FitResult fit_t1_temperature(std::span<const double> temperature_k, std::span<const double> rate,
                             std::optional<double> delta_fixed_k = std::nullopt, std::span<const double> sigma = {});

FitResult fit_exp_recovery(std::span<const double> t, std::span<const double> m, std::span<const double> sigma = {});

/// Sum of Gaussians (or derivatives); fields are fitted in mT. area_i is
/// height * fwhm * sqrt(pi / (4 ln 2)).
FitResult fit_gaussian_lines(const SpectrumCurve& spectrum, int n_lines, SpectrumMode mode);

FitResult fit_linear_baseline(std::span<const double> x, std::span<const double> y, std::span<const double> sigma = {});

/// Field windows (tesla) used for the baseline fit.
using FieldWindow = std::pair<double, double>;

/// Least-squares line through the points inside the windows, subtracted everywhere.
SpectrumCurve subtract_linear_baseline(const SpectrumCurve& curve, std::span<const FieldWindow> windows);

/// Dominant nutation frequency (MHz) of a uniformly sampled signal, time in
/// microseconds. Mean removed, 4x zero padding, parabolic peak refinement.
/// Empty for a flat signal.
std::optional<double> rabi_peak(std::span<const double> t_us, std::span<const double> amplitude);

}  // namespace bispin

#endif  // BISPIN_FITTING_HPP
