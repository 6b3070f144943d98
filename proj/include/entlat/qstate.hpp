#pragma once

// Exact pure-state / density-matrix representation of small qubit registers.
//
// Conventions, fixed globally:
//   * sites are 1-based, site 1 is the most significant bit of basis indices;
//   * bit value 1 means |1> (spin up), 0 means |0> (spin down);
//   * two-qubit gate matrices are 4x4 in the ordered basis
//     |00>, |10>, |01>, |11> where the first symbol belongs to the first
//     site argument (gate basis index g = a + 2*b).

#include <cstdint>
#include <vector>

#include "entlat/common.hpp"

namespace entlat {

class PauliString;
class PauliSum;
class MixedState;

// Pure states stay practical up to ~20 qubits.
inline constexpr int kMaxPureQubits = 20;
// Dense density matrices are restricted to 12 qubits (16 Mi complex entries).
inline constexpr int kMaxMixedQubits = 12;

class PureState {
 public:
  PureState(int n_qubits, Vector amplitudes);

  static PureState basis_state(int n_qubits, std::uint64_t index);

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return amps_.size(); }
  const Vector& amplitudes() const { return amps_; }
  Complex amplitude(std::uint64_t index) const { return amps_(static_cast<Eigen::Index>(index)); }

  double norm_error() const;  // | <psi|psi> - 1 |
  MixedState to_density_matrix() const;

  // |<this|other>|^2; the equality notion used throughout (global phase free).
  double overlap_sq(const PureState& other) const;

 private:
  struct Unchecked {};
  PureState(int n_qubits, Vector amplitudes, Unchecked) noexcept;

  int n_qubits_;
  Vector amps_;

  friend PureState apply_gate_unchecked(const PureState&, const Matrix&, int, int);
  friend class StateBuilder;
};

class MixedState {
 public:
  MixedState(int n_qubits, Matrix rho);

  static MixedState maximally_mixed(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return rho_.rows(); }
  const Matrix& matrix() const { return rho_; }

  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;  // O(dim^3); meant for tests and validation
  void validate(bool check_spectrum = false) const;

 private:
  struct Unchecked {};
  MixedState(int n_qubits, Matrix rho, Unchecked) noexcept;

  int n_qubits_;
  Matrix rho_;

  friend class StateBuilder;
};

// Internal escape hatch: lets library code assemble states it has already
// proven valid without paying the constructor checks again.
class StateBuilder {
 public:
  static PureState pure(int n_qubits, Vector amps) {
    return PureState(n_qubits, std::move(amps), PureState::Unchecked{});
  }
  static MixedState mixed(int n_qubits, Matrix rho) {
    return MixedState(n_qubits, std::move(rho), MixedState::Unchecked{});
  }
};

struct TwoQubitGate {
  Eigen::Matrix4cd matrix;
  std::string label;

  // Validates unitarity to tol::kNorm.
  TwoQubitGate(Eigen::Matrix4cd m, std::string label_);

  TwoQubitGate dagger() const;
  double unitarity_error() const;
};

struct Bipartition {
  std::vector<int> part_a;  // sorted, unique, nonempty, proper subset of 1..n
  int n_qubits;

  Bipartition(std::vector<int> a, int n);
};

PureState apply_gate(const PureState& state, const TwoQubitGate& gate, int i, int j);
MixedState apply_gate(const MixedState& state, const TwoQubitGate& gate, int i, int j);

// Single-qubit unitary on one site; used for basis rotations and twirls.
PureState apply_single_qubit(const PureState& state, const Eigen::Matrix2cd& u, int site);
MixedState apply_single_qubit(const MixedState& state, const Eigen::Matrix2cd& u, int site);

MixedState reduced_density_matrix(const PureState& state, const std::vector<int>& subset);
MixedState reduced_density_matrix(const MixedState& state, const std::vector<int>& subset);

// Squared Schmidt coefficients across the cut, descending. Sums to 1.
std::vector<double> schmidt_spectrum(const PureState& state, const Bipartition& cut);

double purity(const MixedState& rho);

double fidelity(const MixedState& rho, const PureState& psi);   // <psi|rho|psi>
double fidelity(const PureState& phi, const PureState& psi);    // |<phi|psi>|^2

double expectation(const PureState& state, const PauliString& obs);
double expectation(const PureState& state, const PauliSum& obs);
double expectation(const MixedState& state, const PauliString& obs);
double expectation(const MixedState& state, const PauliSum& obs);

}  // namespace entlat
