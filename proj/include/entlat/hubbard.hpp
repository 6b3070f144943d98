#pragma once

// Exact diagonalization of the two-site (and two-double-well) Bose-Hubbard
// model; extraction of the effective two-qubit gate on the single-occupancy
// subspace. hbar = 1 throughout, times in units of 1/energy.

#include <map>
#include <vector>

#include "entlat/common.hpp"

namespace entlat {

struct HubbardParams {
  double j_inner = 0.0;  // intra-double-well tunneling
  double j_inter = 0.0;  // tunneling between neighbouring double wells
  double v = 0.0;        // on-site interaction
  double delta = 0.0;    // spin-dependent tilt between subsites

  void validate() const;
};

// J_ex ~ 2 J^2 / V.
double superexchange_coupling(const HubbardParams& p);
// T = 2 pi / J_ex.
double superexchange_period(const HubbardParams& p);

// Bosonic occupation basis over modes (site, spin), mode index 2*site + spin
// with spin 0 = up, 1 = down. Occupation vectors enumerated in ascending
// lexicographic order.
class FockBasis {
 public:
  static FockBasis double_well();          // 2 sites, 2 atoms, dimension 10
  static FockBasis two_double_wells();     // 4 sites, 4 atoms, dimension 330

  int n_sites() const { return n_sites_; }
  int n_atoms() const { return n_atoms_; }
  int dimension() const { return static_cast<int>(states_.size()); }
  const std::vector<int>& occupation(int idx) const { return states_[static_cast<std::size_t>(idx)]; }
  int index_of(const std::vector<int>& occ) const;

  // Index of the singly-occupied state with the given spin pattern
  // (qubits[s] = 1 means site s+1 holds an up atom).
  int single_occupancy_index(const std::vector<int>& qubits) const;

 private:
  FockBasis(int n_sites, int n_atoms);

  int n_sites_;
  int n_atoms_;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, int> index_;
};

// Hopping (-J terms), on-site interaction (V/2) n_i (n_i - 1) with
// n_i = n_up + n_down, and the spin-dependent tilt
// (Delta/2)(n_Lu - n_Ru - n_Ld + n_Rd) per double well. Real symmetric.
Eigen::MatrixXd build_hamiltonian(const HubbardParams& p, const FockBasis& basis);

// exp(-i H t) |init> via eigendecomposition.
Vector evolve(const Eigen::MatrixXd& h, const Vector& init, double t);
Vector evolve(const HubbardParams& p, const FockBasis& basis, const Vector& init, double t);

struct EffectiveGate {
  Matrix matrix;    // propagator projected onto the single-occupancy subspace
  double leakage;   // mean population escaping the subspace, 1 - ||M||_F^2 / d
};

// Phase-aligned trace overlap |Tr(ideal^dag M)| / d.
double gate_fidelity(const EffectiveGate& gate, const Matrix& ideal);

// Single double well: 4x4 gate in the |00>,|10>,|01>,|11> ordering.
EffectiveGate extract_gate(const HubbardParams& p, double t);

struct ChainLeakageResult {
  double infidelity;           // 1 - F of the parallel gate on both wells
  double isolated_infidelity;  // same with j_inter = 0
  double contribution;         // infidelity - isolated_infidelity
  double leakage;
};

// Full two-double-well model over one gate time; the sqrt(SWAP)^dag
// infidelity attributable to inter-well tunneling.
ChainLeakageResult chain_leakage(const HubbardParams& p, double t);

// Tilt-driven phase step in the deep-barrier limit (hopping frozen).
EffectiveGate tilt_phase_gate(const HubbardParams& p, double t);

// Smallest t > 0 at which the tilt step equals the protocol phase gate on
// the span{|10>,|01>} sector (up to global phase). The antisymmetric tilt
// splits |10> and |01> by 2*Delta, so this is 3*pi/(4*Delta) for Delta > 0
// and pi/(4*|Delta|) for Delta < 0.
double phase_step_time(double delta);

// Restricted ideal: exp(+i (J_ex/2) (XX+YY+ZZ) t) on the pair, 4x4.
Matrix heisenberg_propagator(double j_ex, double t);

}  // namespace entlat
