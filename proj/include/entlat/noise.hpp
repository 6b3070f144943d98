#pragma once

// Error models for the prepared state: white noise, spin-flip preparation
// errors, measurement flips, entangling-step failure, and parameter sweeps.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entlat/estimator.hpp"
#include "entlat/qstate.hpp"

namespace entlat {

struct NoiseParams {
  double p_white = 0.0;  // white-noise admixture
  double p_sf = 1.0;     // probability of a correct spin flip per site
  double p_ms = 1.0;     // probability of a correct single-site readout
  double p_es = 1.0;     // probability the entangling step runs perfectly

  void validate() const;
};

// What the entangling step leaves behind when it fails.
enum class EsFailure {
  kMaximallyMixed,   // failure outputs I/2^N
  kSkipEntangling,   // failure leaves the prepared product state untouched
};

// p * I/2^N + (1-p) |psi><psi|.
MixedState white_noise(const PureState& psi, double p);

// Neel preparation with each site independently correct with probability
// p_sf: a diagonal product-state mixture.
MixedState spin_flip_preparation(int n, double p_sf);

// Expectation of a weight-k Pauli string scales by (2 p_ms - 1)^k.
double measurement_flip_scale(int pauli_weight, double p_ms);
// Equivalent channel on sampled bitstrings: each bit flips w.p. 1 - p_ms.
ShotRecord measurement_flip(const ShotRecord& record, double p_ms, std::uint64_t seed);

// p_es * state + (1 - p_es) * I/2^N, applied once to the entangling step.
MixedState entangling_depolarize(const MixedState& state_perfect, double p_es);

// Full noisy preparation: spin-flip init, protocol unitaries, then the
// entangling-step failure branch in the chosen mode.
MixedState noisy_prepared_state(int n, const NoiseParams& params,
                                EsFailure mode = EsFailure::kMaximallyMixed);

// Local two-qubit depolarizing channel around a gate application; used by
// the reverse-evolution study (per-gate variant of the P_ES model).
MixedState apply_gate_depolarized(const MixedState& state, const TwoQubitGate& gate, int i,
                                  int j, double p_depol);

// Monte-Carlo trajectory estimate of the homogeneous expectations under the
// full noise pipeline (one trajectory per shot, three settings X/Y/Z).
struct SampledHomogeneous {
  // per subset: (mean, stderr) for X, Y, Z in that order
  std::vector<std::array<std::pair<double, double>, 3>> expectations;
  // per subset: witness value sum |<X>|+|<Y>|+|<Z>| and propagated stderr
  std::vector<std::pair<double, double>> witness;
};

SampledHomogeneous sampled_homogeneous(int n, const NoiseParams& params, EsFailure mode,
                                       const std::vector<std::vector<int>>& subsets,
                                       long shots, std::uint64_t seed);

struct SweepRow {
  std::string param;
  double value = 0.0;
  std::string subset;
  double witness_value = 0.0;
  double std_err = 0.0;
};

struct SweepSpec {
  std::string param;          // p_sf | p_ms | p_es | p_white
  std::vector<double> grid;
  NoiseParams fixed;          // values for the parameters not swept
  int n = 10;
  std::vector<std::vector<int>> subsets;  // observable spec (ignored for p_white)
  EsFailure es_mode = EsFailure::kMaximallyMixed;
  long shots = 0;             // 0 = exact expectations
  std::uint64_t seed = 0;
};

// One row per (grid value, subset); exact path is deterministic, the shot
// path is deterministic given (seed, grid index). For p_white the witness
// column carries the stabilizer fidelity bound instead.
std::vector<SweepRow> sweep(const SweepSpec& spec);

// Linear interpolation of the first crossing of `target` along the grid.
std::optional<double> crossing_threshold(const std::vector<SweepRow>& rows,
                                         const std::string& subset_label, double target);

std::string sweep_csv(const std::vector<SweepRow>& rows);

// Uniform grid helper with endpoints included; step sign inferred.
std::vector<double> uniform_grid(double lo, double hi, double step);

}  // namespace entlat
