#include "bispin/spin_core.hpp"

#include <algorithm>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

namespace bispin {

namespace {

bool is_odd_half(double x) {
  const double twice = 2.0 * x;
  const long r = std::lround(twice);
  return std::abs(twice - static_cast<double>(r)) < 1e-12 && (r % 2 != 0);
}

}  // namespace

void SpinSystem::validate() const {
  if (std::abs(electron_spin - 0.5) > 1e-12) {
    throw std::invalid_argument("SpinSystem: only S = 1/2 donors are supported");
  }
  // I must be an odd multiple of 1/2 so that m = m_s + m_I is an integer.
  if (!is_odd_half(nuclear_spin) || nuclear_spin < 0.5) {
    throw std::invalid_argument("SpinSystem: nuclear spin must be a half-integer >= 1/2");
  }
  if (!(hyperfine_mhz > 0.0)) throw std::invalid_argument("SpinSystem: hyperfine_mhz must be positive");
  if (!(g_factor > 0.0)) throw std::invalid_argument("SpinSystem: g_factor must be positive");
}

SpinOperators SpinOperators::for_system(const SpinSystem& sys) {
  sys.validate();
  const auto s = spin_matrices<double>(sys.electron_spin);
  const auto i = spin_matrices<double>(sys.nuclear_spin);
  const Eigen::MatrixXcd eye_s = Eigen::MatrixXcd::Identity(s.z.rows(), s.z.cols());
  const Eigen::MatrixXcd eye_i = Eigen::MatrixXcd::Identity(i.z.rows(), i.z.cols());
  SpinOperators ops;
  ops.sx = Eigen::kroneckerProduct(s.x, eye_i);
  ops.sy = Eigen::kroneckerProduct(s.y, eye_i);
  ops.sz = Eigen::kroneckerProduct(s.z, eye_i);
  ops.ix = Eigen::kroneckerProduct(eye_s, i.x);
  ops.iy = Eigen::kroneckerProduct(eye_s, i.y);
  ops.iz = Eigen::kroneckerProduct(eye_s, i.z);
  return ops;
}

int basis_index(const SpinSystem& sys, double m_s, double m_i) {
  const int n = sys.nuclear_multiplicity();
  const int block = m_s > 0 ? 0 : 1;
  const int k = static_cast<int>(std::lround(sys.nuclear_spin - m_i));
  if (k < 0 || k >= n) throw std::out_of_range("basis_index: m_I out of range");
  return block * n + k;
}

Eigen::MatrixXcd build_hamiltonian(const SpinSystem& sys, double b_tesla) {
  if (!(b_tesla >= 0.0)) throw std::invalid_argument("build_hamiltonian: B must be >= 0");
  const SpinOperators ops = SpinOperators::for_system(sys);
  const double f0 = sys.zeeman_mhz(b_tesla);
  Eigen::MatrixXcd h = f0 * ops.sz - (f0 * sys.nuclear_ratio_delta) * ops.iz + sys.hyperfine_mhz * ops.s_dot_i();
  // Hermitian by construction; symmetrize away rounding in the Sy Iy product.
  return 0.5 * (h + h.adjoint());
}

int label_of(const SpinSystem& sys, DoubletId id) {
  const int k = sys.max_doublet_m() + 1;  // I + 1/2
  if (id.branch == Branch::minus) {
    if (id.m < -k || id.m > k - 1) throw std::out_of_range("label_of: m out of range for minus branch");
    return k - id.m;
  }
  if (id.m < -(k - 1) || id.m > k) throw std::out_of_range("label_of: m out of range for plus branch");
  return 3 * k + id.m;
}

DoubletId doublet_of(const SpinSystem& sys, int label) {
  const int k = sys.max_doublet_m() + 1;
  if (label < 1 || label > 4 * k) throw std::out_of_range("doublet_of: label out of range");
  if (label <= 2 * k) return {k - label, Branch::minus};
  return {label - 3 * k, Branch::plus};
}

std::vector<int> DonorEigensystem::labels_by_energy() const {
  std::vector<int> labels(size());
  std::iota(labels.begin(), labels.end(), 1);
  std::stable_sort(labels.begin(), labels.end(),
                   [this](int a, int b) { return energies(a - 1) < energies(b - 1); });
  return labels;
}

DonorEigensystem diagonalize(const SpinSystem& sys, double b_tesla) {
  const Eigen::MatrixXcd h = build_hamiltonian(sys, b_tesla);
  const int dim = sys.dimension();
  const int k = sys.max_doublet_m() + 1;
  const double spin_i = sys.nuclear_spin;

  DonorEigensystem es;
  es.field_b = b_tesla;
  es.energies = Eigen::VectorXd::Zero(dim);
  es.states = Eigen::MatrixXcd::Zero(dim, dim);
  es.doublet_ids.resize(dim);

  for (int m = -k; m <= k; ++m) {
    // |+1/2, m-1/2> first, then |-1/2, m+1/2>; either may be absent at |m| = k.
    std::vector<int> idx;
    if (m - 0.5 <= spin_i && m - 0.5 >= -spin_i) idx.push_back(basis_index(sys, 0.5, m - 0.5));
    if (m + 0.5 <= spin_i && m + 0.5 >= -spin_i) idx.push_back(basis_index(sys, -0.5, m + 0.5));

    const Eigen::MatrixXcd block = h(idx, idx);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
    const Eigen::VectorXd& vals = solver.eigenvalues();
    const Eigen::MatrixXcd& vecs = solver.eigenvectors();

    for (int c = 0; c < static_cast<int>(idx.size()); ++c) {
      DoubletId id;
      id.m = m;
      if (idx.size() == 1) {
        id.branch = m < 0 ? Branch::minus : Branch::plus;
      } else {
        id.branch = c == 0 ? Branch::minus : Branch::plus;  // ascending within the block
      }
      Eigen::VectorXcd v = vecs.col(c);
      // Phase: plus states have a real positive |+1/2,m-1/2> amplitude,
      // minus states a real positive |-1/2,m+1/2> amplitude.
      int ref = 0;
      if (idx.size() == 2 && id.branch == Branch::minus) ref = 1;
      if (std::abs(v(ref)) > 1e-300) v *= std::conj(v(ref)) / std::abs(v(ref));

      const int col = label_of(sys, id) - 1;
      es.energies(col) = vals(c);
      for (int r = 0; r < static_cast<int>(idx.size()); ++r) es.states(idx[r], col) = v(r);
      es.doublet_ids[col] = id;
    }
  }
  return es;
}

double expectation_sz(const Eigen::VectorXcd& state) {
  const Eigen::Index half = state.size() / 2;
  return 0.5 * (state.head(half).squaredNorm() - state.tail(half).squaredNorm());
}

double expectation_sz(const DonorEigensystem& es, int label) { return expectation_sz(es.state(label)); }

double concurrence(const Eigen::VectorXcd& state) {
  const Eigen::Index n = state.size() / 2;
  // Rows m_s = +1/2, -1/2; columns m_I.
  Eigen::MatrixXcd psi(2, n);
  psi.row(0) = state.head(n).transpose();
  psi.row(1) = state.tail(n).transpose();
  const Eigen::Matrix2cd rho = psi * psi.adjoint();
  const double purity = (rho * rho).trace().real();
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - purity)));
}

double concurrence(const DonorEigensystem& es, int label) { return concurrence(es.state(label)); }

}  // namespace bispin
