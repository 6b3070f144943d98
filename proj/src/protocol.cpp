#include "entlat/protocol.hpp"

#include <bit>
#include <cmath>

#include <nlohmann/json.hpp>

namespace entlat {

namespace gates {

const TwoQubitGate& sqrt_swap_dag() {
  static const TwoQubitGate g = [] {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    const Complex p(0.5, -0.5), q(0.5, 0.5);
    m(0, 0) = 1;
    m(1, 1) = p; m(1, 2) = q;
    m(2, 1) = q; m(2, 2) = p;
    m(3, 3) = 1;
    return TwoQubitGate(m, "SQRT_SWAP_DAG");
  }();
  return g;
}

const TwoQubitGate& sqrt_swap() {
  static const TwoQubitGate g = TwoQubitGate(sqrt_swap_dag().matrix.adjoint(), "SQRT_SWAP");
  return g;
}

const TwoQubitGate& phase() {
  static const TwoQubitGate g = [] {
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
    m(1, 1) = Complex(0, 1);
    return TwoQubitGate(m, "PHASE");
  }();
  return g;
}

const TwoQubitGate& identity() {
  static const TwoQubitGate g = TwoQubitGate(Eigen::Matrix4cd::Identity(), "IDENTITY");
  return g;
}

}  // namespace gates

namespace {

void require_even(int n, int minimum, const char* who) {
  if (n < minimum || n % 2 != 0) {
    throw ConfigError(std::string(who) + ": even N >= " + std::to_string(minimum) + " required");
  }
}

template <typename StateT>
StateT apply_layer(StateT state, const TwoQubitGate& gate,
                   const std::vector<std::pair<int, int>>& pairs) {
  for (const auto& [i, j] : pairs) state = apply_gate(state, gate, i, j);
  return state;
}

}  // namespace

std::string step_label_name(StepLabel label) {
  switch (label) {
    case StepLabel::NEEL: return "NEEL";
    case StepLabel::LAYER1_SQSWAPDAG: return "LAYER1_SQSWAPDAG";
    case StepLabel::PHASE: return "PHASE";
    case StepLabel::LAYER2_SQSWAPDAG: return "LAYER2_SQSWAPDAG";
    case StepLabel::REV_LAYER2: return "REV_LAYER2";
    case StepLabel::REV_PHASE: return "REV_PHASE";
    case StepLabel::REV_LAYER1: return "REV_LAYER1";
  }
  return "?";
}

std::vector<std::pair<int, int>> layer1_pairs(int n) {
  require_even(n, 2, "layer1_pairs");
  std::vector<std::pair<int, int>> pairs;
  for (int k = 1; k <= n / 2; ++k) pairs.emplace_back(2 * k - 1, 2 * k);
  return pairs;
}

std::vector<std::pair<int, int>> layer2_pairs(int n) {
  require_even(n, 2, "layer2_pairs");
  std::vector<std::pair<int, int>> pairs;
  for (int k = 1; k <= n / 2 - 1; ++k) pairs.emplace_back(2 * k, 2 * k + 1);
  return pairs;
}

std::vector<ProtocolStep> generation_steps(int n) {
  return {
      {StepLabel::NEEL, {}},
      {StepLabel::LAYER1_SQSWAPDAG, layer1_pairs(n)},
      {StepLabel::PHASE, layer1_pairs(n)},
      {StepLabel::LAYER2_SQSWAPDAG, layer2_pairs(n)},
  };
}

std::vector<ProtocolStep> reverse_steps(int n) {
  return {
      {StepLabel::REV_LAYER2, layer2_pairs(n)},
      {StepLabel::REV_PHASE, layer1_pairs(n)},
      {StepLabel::REV_LAYER1, layer1_pairs(n)},
  };
}

nlohmann::json protocol_description(int n) {
  nlohmann::json steps = nlohmann::json::array();
  auto emit = [&steps](const std::vector<ProtocolStep>& list) {
    for (const auto& step : list) {
      nlohmann::json placements = nlohmann::json::array();
      for (const auto& [i, j] : step.placements) placements.push_back({i, j});
      steps.push_back({{"label", step_label_name(step.label)}, {"placements", placements}});
    }
  };
  emit(generation_steps(n));
  emit(reverse_steps(n));
  return {{"n", n}, {"steps", steps}};
}

PureState neel_state(int n) {
  require_even(n, 2, "neel_state");
  std::uint64_t idx = 0;
  for (int site = 1; site <= n; ++site) {
    idx = (idx << 1) | static_cast<std::uint64_t>(site % 2);
  }
  return PureState::basis_state(n, idx);
}

TwoQubitGate phase_gate() { return gates::phase(); }

ProtocolStates prepare_target(int n) {
  require_even(n, 2, "prepare_target");
  PureState phi1 = neel_state(n);
  PureState phi2_prime = apply_layer(phi1, gates::sqrt_swap_dag(), layer1_pairs(n));
  PureState phi2 = apply_layer(phi2_prime, gates::phase(), layer1_pairs(n));
  PureState psi = apply_layer(phi2, gates::sqrt_swap_dag(), layer2_pairs(n));
  return {std::move(phi1), std::move(phi2_prime), std::move(phi2), std::move(psi)};
}

PureState target_state(int n) { return prepare_target(n).psi; }

template <typename StateT>
static ReverseStates<StateT> reverse_impl(const StateT& state, int n) {
  require_even(n, 2, "reverse_sequence");
  if (state.n_qubits() != n) throw ConfigError("reverse_sequence: state size mismatch");
  StateT phi4 = apply_layer(state, gates::sqrt_swap(), layer2_pairs(n));
  StateT phi4_prime = apply_layer(phi4, gates::phase().dagger(), layer1_pairs(n));
  StateT phi5 = apply_layer(phi4_prime, gates::sqrt_swap(), layer1_pairs(n));
  return {std::move(phi4), std::move(phi4_prime), std::move(phi5)};
}

ReverseStates<PureState> reverse_sequence(const PureState& state, int n) {
  return reverse_impl(state, n);
}

ReverseStates<MixedState> reverse_sequence(const MixedState& state, int n) {
  return reverse_impl(state, n);
}

bool support_check(const PureState& state) {
  const int n = state.n_qubits();
  if (n % 2 != 0) throw ConfigError("support_check: even N required");
  constexpr double kSupportTol = 1e-10;
  const Vector& a = state.amplitudes();
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(a.size()); ++b) {
    if (std::abs(a(static_cast<Eigen::Index>(b))) <= kSupportTol) continue;
    if (std::popcount(b) != n / 2) return false;
  }
  return true;
}

bool paired_modulus_check(const PureState& state) {
  const int n = state.n_qubits();
  if (n % 2 != 0) throw ConfigError("paired_modulus_check: even N required");
  constexpr double kSupportTol = 1e-10;
  const Vector& a = state.amplitudes();
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(a.size()); ++b) {
    const double mag = std::abs(a(static_cast<Eigen::Index>(b)));
    const double mag_conj = std::abs(a(static_cast<Eigen::Index>(b ^ full)));
    if (std::abs(mag - mag_conj) > kSupportTol) return false;
  }
  return true;
}

}  // namespace entlat
