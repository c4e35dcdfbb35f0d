#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bispin/fitting.hpp"

namespace bispin {

namespace {

struct Evaluator {
  const LeastSquaresProblem& problem;
  std::vector<int> free_index;

  Eigen::VectorXd residuals(const Eigen::VectorXd& p) const {
    const std::span<const double> ps(p.data(), static_cast<std::size_t>(p.size()));
    Eigen::VectorXd r(static_cast<Eigen::Index>(problem.x.size()));
    for (std::size_t i = 0; i < problem.x.size(); ++i) {
      double ri = problem.model(problem.x[i], ps) - problem.y[i];
      if (!problem.sigma.empty()) ri /= problem.sigma[i];
      r(static_cast<Eigen::Index>(i)) = ri;
    }
    return r;
  }

  static double cost(const Eigen::VectorXd& r) {
    const double c = 0.5 * r.squaredNorm();
    return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
  }

  // Central differences, one-sided against an active bound.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& p) const {
    const auto n_free = static_cast<Eigen::Index>(free_index.size());
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(problem.x.size()), n_free);
    for (Eigen::Index c = 0; c < n_free; ++c) {
      const int j = free_index[static_cast<std::size_t>(c)];
      const ParamSpec& spec = problem.params[static_cast<std::size_t>(j)];
      double typical = std::max(std::abs(p(j)), std::abs(spec.init));
      if (typical == 0.0) typical = 1e-2;
      const double h = 1e-6 * typical;
      Eigen::VectorXd up = p, down = p;
      double span = 2.0 * h;
      if (p(j) + h > spec.hi) {
        down(j) = p(j) - h;
        span = h;
      } else if (p(j) - h < spec.lo) {
        up(j) = p(j) + h;
        span = h;
      } else {
        up(j) = p(j) + h;
        down(j) = p(j) - h;
      }
      jac.col(c) = (residuals(up) - residuals(down)) / span;
    }
    return jac;
  }
};

Eigen::VectorXd clamp_to_bounds(Eigen::VectorXd p, const std::vector<ParamSpec>& specs) {
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    p(k) = std::clamp(p(k), specs[j].lo, specs[j].hi);
  }
  return p;
}

// Flags free parameters whose columns vanish or lie in a near-null direction
// of the column-normalized normal matrix.
std::vector<bool> identifiable_columns(const Eigen::MatrixXd& jac) {
  const Eigen::Index n = jac.cols();
  std::vector<bool> ok(static_cast<std::size_t>(n), true);
  if (n == 0) return ok;
  const Eigen::VectorXd norms = jac.colwise().norm();
  const double max_norm = norms.maxCoeff();
  Eigen::MatrixXd scaled = jac;
  for (Eigen::Index c = 0; c < n; ++c) {
    if (!(norms(c) > 1e-12 * max_norm) || norms(c) == 0.0) {
      ok[static_cast<std::size_t>(c)] = false;
      scaled.col(c).setZero();
    } else {
      scaled.col(c) /= norms(c);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scaled.transpose() * scaled);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (solver.eigenvalues()(k) > 1e-10) continue;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (std::abs(solver.eigenvectors()(c, k)) > 0.2) ok[static_cast<std::size_t>(c)] = false;
    }
  }
  return ok;
}

}  // namespace

LevMarOutcome levenberg_marquardt(const LeastSquaresProblem& problem, const LevMarOptions& options) {
  if (problem.x.size() != problem.y.size()) throw std::invalid_argument("levenberg_marquardt: x/y size mismatch");
  if (!problem.sigma.empty() && problem.sigma.size() != problem.x.size()) {
    throw std::invalid_argument("levenberg_marquardt: sigma size mismatch");
  }
  for (double s : problem.sigma) {
    if (!(s > 0.0)) throw std::invalid_argument("levenberg_marquardt: sigma must be positive");
  }

  Evaluator ev{problem, {}};
  Eigen::VectorXd p(static_cast<Eigen::Index>(problem.params.size()));
  for (std::size_t j = 0; j < problem.params.size(); ++j) {
    const ParamSpec& s = problem.params[j];
    if (s.lo > s.hi) throw std::invalid_argument("levenberg_marquardt: inconsistent bounds for " + s.name);
    p(static_cast<Eigen::Index>(j)) = s.init;
    if (!s.fixed) ev.free_index.push_back(static_cast<int>(j));
  }
  p = clamp_to_bounds(p, problem.params);

  LevMarOutcome out;
  out.free_index = ev.free_index;
  Eigen::VectorXd r = ev.residuals(p);
  double cost = Evaluator::cost(r);
  out.accepted_costs.push_back(cost);
  const auto n_free = static_cast<Eigen::Index>(ev.free_index.size());

  double lambda = 1e-3;
  bool converged = n_free == 0;
  int iter = 0;
  while (!converged && iter < options.max_iterations) {
    ++iter;
    const Eigen::MatrixXd jac = ev.jacobian(p);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    // Marquardt scaling done explicitly: solve in columns of unit norm so that
    // parameters many decades apart (P ~ 1e-6, E ~ 1e12) stay well conditioned.
    Eigen::VectorXd col = normal.diagonal().cwiseSqrt();
    for (auto& c : col)
      if (!(c > 0.0)) c = 1.0;
    const Eigen::MatrixXd scaled_normal = col.cwiseInverse().asDiagonal() * normal * col.cwiseInverse().asDiagonal();
    const Eigen::VectorXd scaled_grad = grad.cwiseQuotient(col);

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = scaled_normal;
      damped.diagonal().array() += lambda;
      const Eigen::VectorXd step = damped.ldlt().solve(-scaled_grad).cwiseQuotient(col);
      Eigen::VectorXd trial = p;
      for (Eigen::Index c = 0; c < n_free; ++c) trial(ev.free_index[static_cast<std::size_t>(c)]) += step(c);
      trial = clamp_to_bounds(trial, problem.params);
      const Eigen::VectorXd r_trial = ev.residuals(trial);
      const double cost_trial = Evaluator::cost(r_trial);
      if (cost_trial < cost) {
        // Per-parameter relative step, so small-valued parameters are not hidden by large ones.
        double rel_step = 0.0;
        for (int j : ev.free_index) {
          const double dp = std::abs(trial(j) - p(j));
          if (dp > 0.0) rel_step = std::max(rel_step, dp / std::max(std::abs(p(j)), 1e-300));
        }
        // Cost test needs both actual and predicted reductions to be small.
        const double predicted = -(grad.dot(step) + 0.5 * step.dot(normal * step));
        const double rel_cost = std::max(cost - cost_trial, predicted) / std::max(cost, 1e-300);
        p = trial;
        r = r_trial;
        cost = cost_trial;
        out.accepted_costs.push_back(cost);
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (rel_step < options.step_tol || rel_cost < options.cost_tol || cost == 0.0) converged = true;
      } else {
        lambda *= 10.0;
        // No descent at any damping: stationary to working precision.
        if (lambda > 1e16) {
          converged = true;
          break;
        }
      }
    }
  }

  out.params = p;
  out.cost = cost;
  out.iterations = iter;
  out.converged = converged;
  out.std_errors.assign(problem.params.size(), std::nullopt);
  out.identifiable.assign(problem.params.size(), true);

  if (n_free > 0) {
    const Eigen::MatrixXd jac = ev.jacobian(p);
    const std::vector<bool> ok = identifiable_columns(jac);
    std::vector<int> keep;
    for (Eigen::Index c = 0; c < n_free; ++c) {
      const int j = ev.free_index[static_cast<std::size_t>(c)];
      out.identifiable[static_cast<std::size_t>(j)] = ok[static_cast<std::size_t>(c)];
      if (ok[static_cast<std::size_t>(c)]) keep.push_back(static_cast<int>(c));
      if (!ok[static_cast<std::size_t>(c)] && problem.params[static_cast<std::size_t>(j)].essential) {
        out.converged = false;
      }
    }
    const auto dof = static_cast<double>(problem.x.size()) - static_cast<double>(n_free);
    if (out.converged && dof > 0 && !keep.empty()) {
      const Eigen::MatrixXd sub = jac(Eigen::all, keep);
      const Eigen::VectorXd d = sub.colwise().norm().transpose();
      const Eigen::MatrixXd unit = sub * d.cwiseInverse().asDiagonal();
      const Eigen::MatrixXd cov = d.cwiseInverse().asDiagonal() * (unit.transpose() * unit).inverse() *
                                  d.cwiseInverse().asDiagonal() * (2.0 * cost / dof);
      out.covariance = Eigen::MatrixXd::Zero(n_free, n_free);
      for (std::size_t a = 0; a < keep.size(); ++a) {
        for (std::size_t b = 0; b < keep.size(); ++b) {
          out.covariance(keep[a], keep[b]) = cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
        const int j = ev.free_index[static_cast<std::size_t>(keep[a])];
        out.std_errors[static_cast<std::size_t>(j)] =
            std::sqrt(std::max(0.0, cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a))));
      }
    }
  }
  return out;
}

}  // namespace bispin
