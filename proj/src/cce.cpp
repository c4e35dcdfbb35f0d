#include "bispin/cce.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace bispin {

namespace {

using Matrix4c = Eigen::Matrix4cd;

struct Propagator {
  Eigen::Matrix4d vectors;
  Eigen::Vector4d energies;

  Matrix4c at(double tau_us) const {
    Eigen::Vector4cd phase;
    for (int k = 0; k < 4; ++k) phase(k) = std::polar(1.0, -2.0 * std::numbers::pi * energies(k) * tau_us);
    const Eigen::Matrix4cd v = vectors.cast<std::complex<double>>();
    return v * phase.asDiagonal() * v.transpose();
  }
};

Propagator make_propagator(const Eigen::Matrix4d& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(h);
  return {solver.eigenvectors(), solver.eigenvalues()};
}

void check_times(std::span<const double> times_ms) {
  for (std::size_t k = 1; k < times_ms.size(); ++k) {
    if (!(times_ms[k] > times_ms[k - 1])) throw std::invalid_argument("cce: time grid must be ascending");
  }
}

Eigen::VectorXd to_vector(std::span<const double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) v(static_cast<Eigen::Index>(k)) = xs[k];
  return v;
}

}  // namespace

Eigen::Matrix4d conditioned_pair_hamiltonian(const PairCoupling& pair, double s, double f_zeeman_mhz) {
  constexpr std::array<double, 4> mk{0.5, 0.5, -0.5, -0.5};
  constexpr std::array<double, 4> ml{0.5, -0.5, 0.5, -0.5};
  const double wk = f_zeeman_mhz + s * pair.j_k_mhz;
  const double wl = f_zeeman_mhz + s * pair.j_l_mhz;
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  for (int c = 0; c < 4; ++c) h(c, c) = wk * mk[c] + wl * ml[c] + pair.b_mhz * mk[c] * ml[c];
  // -b/4 (I+I- + I-I+) couples |ud> and |du>.
  h(1, 2) = h(2, 1) = -0.25 * pair.b_mhz;
  return h;
}

std::vector<std::complex<double>> pair_echo(const PairCoupling& pair, double s_a, double s_b, double f_zeeman_mhz,
                                            std::span<const double> times_ms) {
  const Propagator pa = make_propagator(conditioned_pair_hamiltonian(pair, s_a, f_zeeman_mhz));
  const Propagator pb = make_propagator(conditioned_pair_hamiltonian(pair, s_b, f_zeeman_mhz));
  std::vector<std::complex<double>> out(times_ms.size());
  for (std::size_t k = 0; k < times_ms.size(); ++k) {
    const double tau_us = 0.5 * times_ms[k] * 1e3;
    const Matrix4c ua = pa.at(tau_us);
    const Matrix4c ub = pb.at(tau_us);
    const Matrix4c forward = ua * ub;
    const Matrix4c backward = ub * ua;
    // Tr(backward^+ forward) / 4
    out[k] = (backward.conjugate().array() * forward.array()).sum() * 0.25;
  }
  return out;
}

EchoCurve cce2_echo(const BathConfiguration& config, double s_a, double s_b, double f_zeeman_mhz,
                    std::span<const double> times_ms) {
  check_times(times_ms);
  if (config.couplings_j_mhz.size() != config.occupied.size()) {
    throw std::invalid_argument("cce2_echo: configuration has no couplings attached");
  }
  std::vector<std::complex<double>> product(times_ms.size(), {1.0, 0.0});
  for (const SpinPair& p : config.pairs) {
    const PairCoupling pc{config.couplings_j_mhz[p.k], config.couplings_j_mhz[p.l], p.b_mhz};
    const auto factor = pair_echo(pc, s_a, s_b, f_zeeman_mhz, times_ms);
    for (std::size_t k = 0; k < product.size(); ++k) product[k] *= factor[k];
  }
  EchoCurve curve;
  curve.times_ms = to_vector(times_ms);
  curve.amplitude.resize(curve.times_ms.size());
  for (std::size_t k = 0; k < product.size(); ++k) curve.amplitude(static_cast<Eigen::Index>(k)) = std::abs(product[k]);
  return curve;
}

EchoCurve cce2_echo(const BathConfiguration& config, const SpinSystem& sys, int label_upper, int label_lower,
                    double b_tesla, std::span<const double> times_ms) {
  const DonorEigensystem es = diagonalize(sys, b_tesla);
  const double f_z = sys.constants.gyro_si29 * b_tesla;
  return cce2_echo(config, expectation_sz(es, label_upper), expectation_sz(es, label_lower), f_z, times_ms);
}

EchoCurve ensemble_echo(const CceParams& params, const SpinSystem& sys) {
  if (params.n_configs < 1) throw std::invalid_argument("ensemble_echo: n_configs must be >= 1");
  const Lattice lattice = generate_lattice(params.lattice);
  const DonorEigensystem es = diagonalize(sys, params.field_b);
  const double s_a = expectation_sz(es, params.label_upper);
  const double s_b = expectation_sz(es, params.label_lower);
  const double f_z = sys.constants.gyro_si29 * params.field_b;
  const std::span<const double> times(params.times_ms.data(), static_cast<std::size_t>(params.times_ms.size()));
  check_times(times);

  const auto n = static_cast<std::size_t>(params.n_configs);
  std::vector<Eigen::VectorXd> curves(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      BathConfiguration config = occupy(lattice, params.abundance, params.seed_base + i);
      attach_couplings(config, params.kohn_luttinger, sys.g_factor, params.r_max_nm, params.b_direction,
                       sys.constants);
      curves[i] = cce2_echo(config, s_a, s_b, f_z, times).amplitude;
    }
  };
  const int workers = std::clamp(params.workers, 1, static_cast<int>(n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  // Fixed-order reduction: identical bits for any worker count.
  const Eigen::Index nt = params.times_ms.size();
  EchoCurve out;
  out.times_ms = params.times_ms;
  out.amplitude = Eigen::VectorXd::Zero(nt);
  out.std_of_mean = Eigen::VectorXd::Zero(nt);
  for (const auto& c : curves) out.amplitude += c;
  out.amplitude /= static_cast<double>(n);
  if (n > 1) {
    for (const auto& c : curves) out.std_of_mean.array() += (c - out.amplitude).array().square();
    out.std_of_mean = (out.std_of_mean / static_cast<double>(n - 1)).cwiseSqrt() / std::sqrt(static_cast<double>(n));
  }
  return out;
}

double sup_norm_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_norm_distance: size mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

ConvergenceTable convergence_study(const CceParams& params, const SpinSystem& sys, std::span<const double> sides_nm,
                                   std::span<const double> r_max_list_nm) {
  if (sides_nm.empty() || r_max_list_nm.empty()) throw std::invalid_argument("convergence_study: empty list");
  ConvergenceTable table;
  table.sides_nm.assign(sides_nm.begin(), sides_nm.end());
  table.r_max_nm.assign(r_max_list_nm.begin(), r_max_list_nm.end());
  for (double side : sides_nm) {
    for (double r_max : r_max_list_nm) {
      CceParams p = params;
      p.lattice.side_nm = side;
      p.r_max_nm = r_max;
      table.entries.push_back({side, r_max, ensemble_echo(p, sys)});
    }
  }
  const std::size_t ns = sides_nm.size(), nr = r_max_list_nm.size();
  table.side_distance.assign(nr, {});
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t s = 0; s + 1 < ns; ++s)
      table.side_distance[r].push_back(sup_norm_distance(table.at(s, r).curve.amplitude, table.at(s + 1, r).curve.amplitude));
  table.r_max_distance.assign(ns, {});
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t r = 0; r + 1 < nr; ++r)
      table.r_max_distance[s].push_back(sup_norm_distance(table.at(s, r).curve.amplitude, table.at(s, r + 1).curve.amplitude));
  return table;
}

}  // namespace bispin
