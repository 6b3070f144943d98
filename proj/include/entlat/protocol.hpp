#pragma once

// The two-layer generation protocol (Neel -> Bell pairs -> target) and its
// reverse-evolution counterpart.

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "entlat/qstate.hpp"

namespace entlat {

namespace gates {

// sqrt(SWAP)^dag in |00>,|10>,|01>,|11> ordering.
const TwoQubitGate& sqrt_swap_dag();
// sqrt(SWAP) = (sqrt(SWAP)^dag)^3; stored as the adjoint.
const TwoQubitGate& sqrt_swap();
// Relative phase pi/2 on |10>: diag(1, i, 1, 1).
const TwoQubitGate& phase();
const TwoQubitGate& identity();

}  // namespace gates

enum class StepLabel {
  NEEL,
  LAYER1_SQSWAPDAG,
  PHASE,
  LAYER2_SQSWAPDAG,
  REV_LAYER2,
  REV_PHASE,
  REV_LAYER1,
};

std::string step_label_name(StepLabel label);

struct ProtocolStep {
  StepLabel label;
  std::vector<std::pair<int, int>> placements;  // disjoint within a step
};

// First-layer pairs (2k-1, 2k) and second-layer pairs (2k, 2k+1).
std::vector<std::pair<int, int>> layer1_pairs(int n);
std::vector<std::pair<int, int>> layer2_pairs(int n);

std::vector<ProtocolStep> generation_steps(int n);
std::vector<ProtocolStep> reverse_steps(int n);
nlohmann::json protocol_description(int n);

// |1010...10>. Even n only.
PureState neel_state(int n);

TwoQubitGate phase_gate();

struct ProtocolStates {
  PureState phi1;        // Neel
  PureState phi2_prime;  // after first sqrt(SWAP)^dag layer
  PureState phi2;        // Bell-pair product
  PureState psi;         // target
};

// Runs steps 1-5 for even n >= 2 and returns all intermediates.
ProtocolStates prepare_target(int n);
PureState target_state(int n);

template <typename StateT>
struct ReverseStates {
  StateT phi4;        // after reverse second layer (sqrt(SWAP))
  StateT phi4_prime;  // after reverse phase
  StateT phi5;        // after reverse first layer; Neel when perfect
};

ReverseStates<PureState> reverse_sequence(const PureState& state, int n);
ReverseStates<MixedState> reverse_sequence(const MixedState& state, int n);

// True iff every nonzero amplitude sits on a basis state with exactly n/2
// ones (total spin zero; collective dephasing acts as a global phase).
bool support_check(const PureState& state);

// True iff each basis state and its bitwise complement carry amplitudes of
// equal modulus. Holds for the target; not for a bare product state.
bool paired_modulus_check(const PureState& state);

}  // namespace entlat
