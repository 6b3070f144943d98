#include "entlat/hubbard.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

namespace entlat {

namespace {

constexpr int kDimensionCap = 512;

void enumerate_occupations(int modes, int atoms, std::vector<int>& prefix,
                           std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == modes - 1) {
    prefix.push_back(atoms);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int k = 0; k <= atoms; ++k) {
    prefix.push_back(k);
    enumerate_occupations(modes, atoms - k, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

void HubbardParams::validate() const {
  if (!std::isfinite(j_inner) || !std::isfinite(j_inter) || !std::isfinite(v) ||
      !std::isfinite(delta)) {
    throw ConfigError("HubbardParams: parameters must be finite");
  }
}

double superexchange_coupling(const HubbardParams& p) {
  if (p.v <= 0) throw ConfigError("superexchange_coupling: V > 0 required");
  return 2.0 * p.j_inner * p.j_inner / p.v;
}

double superexchange_period(const HubbardParams& p) {
  return 2.0 * std::numbers::pi / superexchange_coupling(p);
}

FockBasis::FockBasis(int n_sites, int n_atoms) : n_sites_(n_sites), n_atoms_(n_atoms) {
  std::vector<int> prefix;
  enumerate_occupations(2 * n_sites, n_atoms, prefix, states_);
  if (static_cast<int>(states_.size()) > kDimensionCap) {
    throw ConfigError("FockBasis: dimension exceeds cap");
  }
  for (int i = 0; i < dimension(); ++i) index_[states_[static_cast<std::size_t>(i)]] = i;
}

FockBasis FockBasis::double_well() { return FockBasis(2, 2); }
FockBasis FockBasis::two_double_wells() { return FockBasis(4, 4); }

int FockBasis::index_of(const std::vector<int>& occ) const {
  const auto it = index_.find(occ);
  if (it == index_.end()) throw ConfigError("FockBasis: occupation not in basis");
  return it->second;
}

int FockBasis::single_occupancy_index(const std::vector<int>& qubits) const {
  if (static_cast<int>(qubits.size()) != n_sites_) {
    throw ConfigError("single_occupancy_index: wrong pattern length");
  }
  std::vector<int> occ(static_cast<std::size_t>(2 * n_sites_), 0);
  for (int s = 0; s < n_sites_; ++s) {
    occ[static_cast<std::size_t>(2 * s + (qubits[static_cast<std::size_t>(s)] ? 0 : 1))] = 1;
  }
  return index_of(occ);
}

Eigen::MatrixXd build_hamiltonian(const HubbardParams& p, const FockBasis& basis) {
  p.validate();
  const int n_sites = basis.n_sites();
  if (n_sites % 2 != 0) throw ConfigError("build_hamiltonian: sites must pair into double wells");
  const int dim = basis.dimension();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);

  // bonds: inside wells (even left site) j_inner, across wells j_inter
  std::vector<std::pair<std::pair<int, int>, double>> bonds;
  for (int s = 0; s + 1 < n_sites; ++s) {
    bonds.push_back({{s, s + 1}, s % 2 == 0 ? p.j_inner : p.j_inter});
  }

  for (int i = 0; i < dim; ++i) {
    const auto& occ = basis.occupation(i);
    double e = 0.0;
    for (int s = 0; s < n_sites; ++s) {
      const int nu = occ[static_cast<std::size_t>(2 * s)];
      const int nd = occ[static_cast<std::size_t>(2 * s + 1)];
      const int nt = nu + nd;
      e += 0.5 * p.v * nt * (nt - 1);
    }
    for (int w = 0; w < n_sites / 2; ++w) {
      const int left = 2 * w, right = 2 * w + 1;
      e += 0.5 * p.delta *
           (occ[static_cast<std::size_t>(2 * left)] - occ[static_cast<std::size_t>(2 * right)] -
            occ[static_cast<std::size_t>(2 * left + 1)] + occ[static_cast<std::size_t>(2 * right + 1)]);
    }
    h(i, i) = e;

    for (const auto& [bond, j] : bonds) {
      if (j == 0.0) continue;
      for (int spin = 0; spin < 2; ++spin) {
        const int m1 = 2 * bond.first + spin;
        const int m2 = 2 * bond.second + spin;
        // -J a^dag_m1 a_m2 and Hermitian partner
        for (const auto& [src, dst] : {std::pair{m2, m1}, std::pair{m1, m2}}) {
          if (occ[static_cast<std::size_t>(src)] == 0) continue;
          std::vector<int> next = occ;
          next[static_cast<std::size_t>(src)] -= 1;
          next[static_cast<std::size_t>(dst)] += 1;
          const double amp = -j * std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(src)]) *
                                            (occ[static_cast<std::size_t>(dst)] + 1));
          h(basis.index_of(next), i) += amp;
        }
      }
    }
  }
  return h;
}

Vector evolve(const Eigen::MatrixXd& h, const Vector& init, double t) {
  if (t < 0) throw ConfigError("evolve: t >= 0 required");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw InvariantError("evolve: eigendecomposition failed");
  const Eigen::VectorXd& w = es.eigenvalues();
  const Eigen::MatrixXd& u = es.eigenvectors();
  Vector coeffs = u.transpose() * init;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    coeffs(k) *= std::exp(Complex(0, -w(k) * t));
  }
  return u * coeffs;
}

Vector evolve(const HubbardParams& p, const FockBasis& basis, const Vector& init, double t) {
  return evolve(build_hamiltonian(p, basis), init, t);
}

double gate_fidelity(const EffectiveGate& gate, const Matrix& ideal) {
  if (gate.matrix.rows() != ideal.rows()) throw ConfigError("gate_fidelity: dimension mismatch");
  const double d = static_cast<double>(ideal.rows());
  return std::abs((ideal.adjoint() * gate.matrix).trace()) / d;
}

namespace {

EffectiveGate project_gate(const Eigen::MatrixXd& h, const FockBasis& basis, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw InvariantError("project_gate: eigendecomposition failed");
  const Eigen::VectorXd& w = es.eigenvalues();
  const Eigen::MatrixXd& u = es.eigenvectors();

  const int k = basis.n_sites();
  const int sub = 1 << k;
  // subspace ordering: per-well gate index g = a + 2b, wells little-endian
  std::vector<int> idxs(static_cast<std::size_t>(sub));
  for (int g = 0; g < sub; ++g) {
    std::vector<int> qubits(static_cast<std::size_t>(k), 0);
    for (int wi = 0; wi < k / 2; ++wi) {
      const int gw = (g >> (2 * wi)) & 3;
      qubits[static_cast<std::size_t>(2 * wi)] = gw & 1;
      qubits[static_cast<std::size_t>(2 * wi + 1)] = (gw >> 1) & 1;
    }
    idxs[static_cast<std::size_t>(g)] = basis.single_occupancy_index(qubits);
  }

  Matrix m(sub, sub);
  for (int col = 0; col < sub; ++col) {
    Vector init = Vector::Zero(basis.dimension());
    init(idxs[static_cast<std::size_t>(col)]) = 1.0;
    Vector coeffs = u.transpose() * init;
    for (Eigen::Index q = 0; q < coeffs.size(); ++q) coeffs(q) *= std::exp(Complex(0, -w(q) * t));
    const Vector full = u * coeffs;
    for (int row = 0; row < sub; ++row) m(row, col) = full(idxs[static_cast<std::size_t>(row)]);
  }
  const double leakage = std::max(0.0, 1.0 - m.squaredNorm() / static_cast<double>(sub));
  return {std::move(m), leakage};
}

}  // namespace

EffectiveGate extract_gate(const HubbardParams& p, double t) {
  if (t < 0) throw ConfigError("extract_gate: t >= 0 required");
  const FockBasis basis = FockBasis::double_well();
  return project_gate(build_hamiltonian(p, basis), basis, t);
}

ChainLeakageResult chain_leakage(const HubbardParams& p, double t) {
  if (t < 0) throw ConfigError("chain_leakage: t >= 0 required");
  const FockBasis basis = FockBasis::two_double_wells();

  const EffectiveGate coupled = project_gate(build_hamiltonian(p, basis), basis, t);
  HubbardParams isolated = p;
  isolated.j_inter = 0.0;
  const EffectiveGate decoupled = project_gate(build_hamiltonian(isolated, basis), basis, t);

  // ideal = sqrt(SWAP)^dag on both wells; little-endian well ordering
  Eigen::Matrix4cd g;
  const Complex a(0.5, -0.5), b(0.5, 0.5);
  g << 1, 0, 0, 0, 0, a, b, 0, 0, b, a, 0, 0, 0, 0, 1;
  const Matrix ideal = Eigen::kroneckerProduct(g, g).eval();

  ChainLeakageResult r;
  r.infidelity = 1.0 - gate_fidelity(coupled, ideal);
  r.isolated_infidelity = 1.0 - gate_fidelity(decoupled, ideal);
  r.contribution = r.infidelity - r.isolated_infidelity;
  r.leakage = coupled.leakage;
  return r;
}

EffectiveGate tilt_phase_gate(const HubbardParams& p, double t) {
  HubbardParams frozen = p;
  frozen.j_inner = 0.0;  // deep-barrier step: hopping suppressed
  frozen.j_inter = 0.0;
  const FockBasis basis = FockBasis::double_well();
  return project_gate(build_hamiltonian(frozen, basis), basis, t);
}

double phase_step_time(double delta) {
  if (delta == 0.0) throw ConfigError("phase_step_time: Delta must be nonzero");
  constexpr double pi = std::numbers::pi;
  return delta > 0 ? 3.0 * pi / (4.0 * delta) : pi / (4.0 * -delta);
}

Matrix heisenberg_propagator(double j_ex, double t) {
  // -(J_ex/2)(XX+YY+ZZ): triplet eigenvalue -J_ex/2, singlet +3 J_ex/2
  Matrix u = Matrix::Zero(4, 4);
  const Complex pt = std::exp(Complex(0, j_ex * t / 2.0));
  const Complex ps = std::exp(Complex(0, -3.0 * j_ex * t / 2.0));
  u(0, 0) = pt;
  u(3, 3) = pt;
  u(1, 1) = u(2, 2) = 0.5 * (pt + ps);
  u(1, 2) = u(2, 1) = 0.5 * (pt - ps);
  return u;
}

}  // namespace entlat
