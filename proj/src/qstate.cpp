#include "entlat/qstate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "entlat/pauli.hpp"

namespace entlat {

namespace {

void check_sites(int i, int j, int n) {
  if (i < 1 || i > n || j < 1 || j > n) {
    throw ConfigError("gate site index out of range");
  }
  if (i == j) {
    throw ConfigError("gate sites must be distinct");
  }
}

std::vector<int> checked_subset(const std::vector<int>& subset, int n) {
  if (subset.empty()) {
    throw ConfigError("subset must be nonempty");
  }
  std::vector<int> s = subset;
  std::sort(s.begin(), s.end());
  if (s.front() < 1 || s.back() > n) {
    throw ConfigError("subset site out of range");
  }
  if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
    throw ConfigError("subset sites must be distinct");
  }
  return s;
}

// Rearranges amplitudes into a 2^|A| x 2^|rest| matrix, A-sites indexing rows.
Matrix unfold(const PureState& state, const std::vector<int>& part_a) {
  const int n = state.n_qubits();
  std::vector<int> rest;
  for (int s = 1; s <= n; ++s) {
    if (!std::binary_search(part_a.begin(), part_a.end(), s)) rest.push_back(s);
  }
  const auto ka = static_cast<int>(part_a.size());
  const auto kb = static_cast<int>(rest.size());
  Matrix m(std::int64_t{1} << ka, std::int64_t{1} << kb);
  const Vector& a = state.amplitudes();
  for (std::uint64_t idx = 0; idx < static_cast<std::uint64_t>(a.size()); ++idx) {
    std::uint64_t row = 0, col = 0;
    for (int p = 0; p < ka; ++p) row = (row << 1) | static_cast<std::uint64_t>(bit_of(idx, part_a[p], n));
    for (int p = 0; p < kb; ++p) col = (col << 1) | static_cast<std::uint64_t>(bit_of(idx, rest[p], n));
    m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = a(static_cast<Eigen::Index>(idx));
  }
  return m;
}

// Applies a 4x4 gate (basis |00>,|10>,|01>,|11>, g = a + 2b) to a 2^n vector.
void apply_gate_kernel(Vector& v, const Eigen::Matrix4cd& g, int i, int j, int n) {
  const std::uint64_t bi = std::uint64_t{1} << bit_position(i, n);
  const std::uint64_t bj = std::uint64_t{1} << bit_position(j, n);
  const std::uint64_t dim = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t base = 0; base < dim; ++base) {
    if ((base & bi) || (base & bj)) continue;
    const std::uint64_t i00 = base;
    const std::uint64_t i10 = base | bi;
    const std::uint64_t i01 = base | bj;
    const std::uint64_t i11 = base | bi | bj;
    const Complex a0 = v(i00), a1 = v(i10), a2 = v(i01), a3 = v(i11);
    v(i00) = g(0, 0) * a0 + g(0, 1) * a1 + g(0, 2) * a2 + g(0, 3) * a3;
    v(i10) = g(1, 0) * a0 + g(1, 1) * a1 + g(1, 2) * a2 + g(1, 3) * a3;
    v(i01) = g(2, 0) * a0 + g(2, 1) * a1 + g(2, 2) * a2 + g(2, 3) * a3;
    v(i11) = g(3, 0) * a0 + g(3, 1) * a1 + g(3, 2) * a2 + g(3, 3) * a3;
  }
}

void apply_1q_kernel(Vector& v, const Eigen::Matrix2cd& u, int site, int n) {
  const std::uint64_t b = std::uint64_t{1} << bit_position(site, n);
  const std::uint64_t dim = static_cast<std::uint64_t>(v.size());
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & b) continue;
    const Complex a0 = v(base), a1 = v(base | b);
    v(base) = u(0, 0) * a0 + u(0, 1) * a1;
    v(base | b) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

// phase(b) for a Pauli string split as i^y * (-1)^{popcount(b & zy_mask)}.
inline Complex i_power(int y) {
  switch (y & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace

PureState::PureState(int n_qubits, Vector amplitudes) : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits_ < 1 || n_qubits_ > kMaxPureQubits) {
    throw ConfigError("PureState: n_qubits must be in [1, " + std::to_string(kMaxPureQubits) + "]");
  }
  if (amps_.size() != (std::int64_t{1} << n_qubits_)) {
    throw ConfigError("PureState: amplitude vector has wrong length");
  }
  if (norm_error() > tol::kNorm) {
    throw InvariantError("PureState: amplitudes not normalized (error " + std::to_string(norm_error()) + ")");
  }
}

PureState::PureState(int n_qubits, Vector amplitudes, Unchecked) noexcept
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {}

PureState PureState::basis_state(int n_qubits, std::uint64_t index) {
  if (n_qubits < 1 || n_qubits > kMaxPureQubits) {
    throw ConfigError("basis_state: bad qubit count");
  }
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  if (index >= static_cast<std::uint64_t>(dim)) {
    throw ConfigError("basis_state: index out of range");
  }
  Vector v = Vector::Zero(dim);
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(n_qubits, std::move(v), Unchecked{});
}

double PureState::norm_error() const { return std::abs(amps_.squaredNorm() - 1.0); }

MixedState PureState::to_density_matrix() const {
  if (n_qubits_ > kMaxMixedQubits) {
    throw ConfigError("to_density_matrix: register too large for a dense density matrix");
  }
  return StateBuilder::mixed(n_qubits_, amps_ * amps_.adjoint());
}

double PureState::overlap_sq(const PureState& other) const {
  if (other.n_qubits_ != n_qubits_) throw ConfigError("overlap_sq: dimension mismatch");
  return std::norm(amps_.dot(other.amps_));
}

MixedState::MixedState(int n_qubits, Matrix rho) : n_qubits_(n_qubits), rho_(std::move(rho)) {
  if (n_qubits_ < 1 || n_qubits_ > kMaxMixedQubits) {
    throw ConfigError("MixedState: n_qubits must be in [1, " + std::to_string(kMaxMixedQubits) + "]");
  }
  const std::int64_t dim = std::int64_t{1} << n_qubits_;
  if (rho_.rows() != dim || rho_.cols() != dim) {
    throw ConfigError("MixedState: matrix has wrong dimensions");
  }
  validate(false);
}

MixedState::MixedState(int n_qubits, Matrix rho, Unchecked) noexcept
    : n_qubits_(n_qubits), rho_(std::move(rho)) {}

MixedState MixedState::maximally_mixed(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxMixedQubits) throw ConfigError("maximally_mixed: bad qubit count");
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  return StateBuilder::mixed(n_qubits, Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

double MixedState::trace_error() const { return std::abs(rho_.trace() - Complex(1.0, 0.0)); }

double MixedState::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double MixedState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void MixedState::validate(bool check_spectrum) const {
  if (trace_error() > tol::kNorm) {
    throw InvariantError("MixedState: trace differs from 1 by " + std::to_string(trace_error()));
  }
  if (hermiticity_error() > tol::kNorm) {
    throw InvariantError("MixedState: not Hermitian (error " + std::to_string(hermiticity_error()) + ")");
  }
  if (check_spectrum && min_eigenvalue() < tol::kEigenFloor) {
    throw InvariantError("MixedState: negative eigenvalue " + std::to_string(min_eigenvalue()));
  }
}

TwoQubitGate::TwoQubitGate(Eigen::Matrix4cd m, std::string label_) : matrix(m), label(std::move(label_)) {
  if (unitarity_error() > tol::kNorm) {
    throw InvariantError("TwoQubitGate '" + label + "': not unitary");
  }
}

TwoQubitGate TwoQubitGate::dagger() const {
  return TwoQubitGate(matrix.adjoint(), label + "_dag");
}

double TwoQubitGate::unitarity_error() const {
  return (matrix.adjoint() * matrix - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
}

Bipartition::Bipartition(std::vector<int> a, int n) : part_a(std::move(a)), n_qubits(n) {
  part_a = checked_subset(part_a, n);
  if (static_cast<int>(part_a.size()) == n) {
    throw ConfigError("Bipartition: part A must be a proper subset");
  }
}

PureState apply_gate(const PureState& state, const TwoQubitGate& gate, int i, int j) {
  check_sites(i, j, state.n_qubits());
  Vector v = state.amplitudes();
  apply_gate_kernel(v, gate.matrix, i, j, state.n_qubits());
  return StateBuilder::pure(state.n_qubits(), std::move(v));
}

MixedState apply_gate(const MixedState& state, const TwoQubitGate& gate, int i, int j) {
  const int n = state.n_qubits();
  check_sites(i, j, n);
  Matrix m = state.matrix();
  // rho -> U rho U^dag: transform every column by U, then every row by U*.
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Vector col = m.col(c);
    apply_gate_kernel(col, gate.matrix, i, j, n);
    m.col(c) = col;
  }
  const Eigen::Matrix4cd conj = gate.matrix.conjugate();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Vector row = m.row(r).transpose();
    apply_gate_kernel(row, conj, i, j, n);
    m.row(r) = row.transpose();
  }
  return StateBuilder::mixed(n, std::move(m));
}

PureState apply_single_qubit(const PureState& state, const Eigen::Matrix2cd& u, int site) {
  const int n = state.n_qubits();
  if (site < 1 || site > n) throw ConfigError("apply_single_qubit: site out of range");
  Vector v = state.amplitudes();
  apply_1q_kernel(v, u, site, n);
  return StateBuilder::pure(n, std::move(v));
}

MixedState apply_single_qubit(const MixedState& state, const Eigen::Matrix2cd& u, int site) {
  const int n = state.n_qubits();
  if (site < 1 || site > n) throw ConfigError("apply_single_qubit: site out of range");
  Matrix m = state.matrix();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Vector col = m.col(c);
    apply_1q_kernel(col, u, site, n);
    m.col(c) = col;
  }
  const Eigen::Matrix2cd conj = u.conjugate();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Vector row = m.row(r).transpose();
    apply_1q_kernel(row, conj, site, n);
    m.row(r) = row.transpose();
  }
  return StateBuilder::mixed(n, std::move(m));
}

MixedState reduced_density_matrix(const PureState& state, const std::vector<int>& subset) {
  const int n = state.n_qubits();
  const std::vector<int> keep = checked_subset(subset, n);
  if (static_cast<int>(keep.size()) > kMaxMixedQubits) {
    throw ConfigError("reduced_density_matrix: kept subsystem too large");
  }
  Matrix m = unfold(state, keep);
  return StateBuilder::mixed(static_cast<int>(keep.size()), m * m.adjoint());
}

MixedState reduced_density_matrix(const MixedState& state, const std::vector<int>& subset) {
  const int n = state.n_qubits();
  const std::vector<int> keep = checked_subset(subset, n);
  const int k = static_cast<int>(keep.size());
  std::vector<int> rest;
  for (int s = 1; s <= n; ++s) {
    if (!std::binary_search(keep.begin(), keep.end(), s)) rest.push_back(s);
  }
  const std::int64_t dk = std::int64_t{1} << k;
  const std::int64_t dr = std::int64_t{1} << static_cast<int>(rest.size());
  // Scatter (kept, rest) sub-indices back into full basis indices once.
  std::vector<std::uint64_t> keep_scatter(static_cast<std::size_t>(dk), 0);
  std::vector<std::uint64_t> rest_scatter(static_cast<std::size_t>(dr), 0);
  for (std::int64_t a = 0; a < dk; ++a) {
    std::uint64_t idx = 0;
    for (int p = 0; p < k; ++p) {
      if ((a >> (k - 1 - p)) & 1) idx |= std::uint64_t{1} << bit_position(keep[p], n);
    }
    keep_scatter[static_cast<std::size_t>(a)] = idx;
  }
  for (std::int64_t r = 0; r < dr; ++r) {
    std::uint64_t idx = 0;
    for (std::size_t p = 0; p < rest.size(); ++p) {
      if ((r >> (rest.size() - 1 - p)) & 1) idx |= std::uint64_t{1} << bit_position(rest[p], n);
    }
    rest_scatter[static_cast<std::size_t>(r)] = idx;
  }
  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& rho = state.matrix();
  for (std::int64_t a = 0; a < dk; ++a) {
    for (std::int64_t b = 0; b < dk; ++b) {
      Complex acc = 0;
      for (std::int64_t r = 0; r < dr; ++r) {
        acc += rho(static_cast<Eigen::Index>(keep_scatter[a] | rest_scatter[r]),
                   static_cast<Eigen::Index>(keep_scatter[b] | rest_scatter[r]));
      }
      out(a, b) = acc;
    }
  }
  return StateBuilder::mixed(k, std::move(out));
}

std::vector<double> schmidt_spectrum(const PureState& state, const Bipartition& cut) {
  if (cut.n_qubits != state.n_qubits()) throw ConfigError("schmidt_spectrum: dimension mismatch");
  if (state.norm_error() > tol::kNorm) {
    throw InvariantError("schmidt_spectrum: state not normalized");
  }
  Matrix m = unfold(state, cut.part_a);
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  std::vector<double> lambdas(static_cast<std::size_t>(sv.size()));
  for (Eigen::Index i = 0; i < sv.size(); ++i) lambdas[static_cast<std::size_t>(i)] = sv(i) * sv(i);
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  double total = 0;
  for (double l : lambdas) total += l;
  if (std::abs(total - 1.0) > 1e-10) {
    throw InvariantError("schmidt_spectrum: coefficients sum to " + std::to_string(total));
  }
  return lambdas;
}

double purity(const MixedState& rho) { return rho.matrix().squaredNorm(); }

double fidelity(const MixedState& rho, const PureState& psi) {
  if (rho.n_qubits() != psi.n_qubits()) throw ConfigError("fidelity: dimension mismatch");
  const Vector& v = psi.amplitudes();
  return std::real(v.dot(rho.matrix() * v));
}

double fidelity(const PureState& phi, const PureState& psi) { return phi.overlap_sq(psi); }

double expectation(const PureState& state, const PauliString& obs) {
  const int n = state.n_qubits();
  if (obs.n_qubits() != n) throw ConfigError("expectation: observable support mismatch");
  const std::uint64_t xm = obs.x_mask();
  const std::uint64_t zym = obs.zy_mask();
  const Complex iy = i_power(obs.y_count());
  const Vector& a = state.amplitudes();
  Complex acc = 0;
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(a.size()); ++b) {
    const double sign = (std::popcount(b & zym) & 1) ? -1.0 : 1.0;
    acc += std::conj(a(static_cast<Eigen::Index>(b ^ xm))) * sign * a(static_cast<Eigen::Index>(b));
  }
  return obs.weight() * std::real(iy * acc);
}

double expectation(const MixedState& state, const PauliString& obs) {
  const int n = state.n_qubits();
  if (obs.n_qubits() != n) throw ConfigError("expectation: observable support mismatch");
  const std::uint64_t xm = obs.x_mask();
  const std::uint64_t zym = obs.zy_mask();
  const Complex iy = i_power(obs.y_count());
  const Matrix& rho = state.matrix();
  Complex acc = 0;
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(rho.rows()); ++b) {
    const double sign = (std::popcount(b & zym) & 1) ? -1.0 : 1.0;
    acc += sign * rho(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b ^ xm));
  }
  return obs.weight() * std::real(iy * acc);
}

double expectation(const PureState& state, const PauliSum& obs) {
  double total = 0;
  for (const auto& t : obs.terms()) total += expectation(state, t);
  return total;
}

double expectation(const MixedState& state, const PauliSum& obs) {
  double total = 0;
  for (const auto& t : obs.terms()) total += expectation(state, t);
  return total;
}

}  // namespace entlat
