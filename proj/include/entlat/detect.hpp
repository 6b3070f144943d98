#pragma once

// The three entanglement-detection protocols: the fidelity-based GME witness
// with its stabilizer lower bound, the homogeneous two-setting
// full-entanglement certification, and the reverse-evolution fidelity series.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "entlat/noise.hpp"
#include "entlat/qstate.hpp"

namespace entlat {

inline constexpr double kGmeFidelityBound = 5.0 / 8.0;

// <W_Psi> = 5/8 - F(rho, Psi); negative certifies GME.
double gme_witness(const MixedState& rho);
double gme_witness(const PureState& phi);

// (1/2) sum e_i - (n/2 - 1); a guaranteed fidelity lower bound.
double fidelity_lower_bound(const std::vector<double>& stabilizer_expectations, int n);

struct HomogeneousResult {
  double value = 0.0;                     // |<X..>| + |<Y..>| + |<Z..>|
  std::array<double, 3> raw{};            // signed <X..>, <Y..>, <Z..>
};

HomogeneousResult homogeneous_value(const MixedState& rho, const std::vector<int>& subset);
HomogeneousResult homogeneous_value(const PureState& psi, const std::vector<int>& subset);

// The subset walk used by the certification argument: grow the left part
// through pairs, quads, ... then close with mirrored checks from the right
// end. Any even n >= 6.
std::vector<std::vector<int>> certification_schedule(int n);

struct CertificationCheck {
  std::vector<int> subset;
  HomogeneousResult homogeneous;
  bool violated = false;                  // value > 1
  std::vector<int> excluded_cut_a;        // odd-odd cut ruled out (empty if n/a)
  std::vector<int> merged_sites;          // sites forced into one part
  std::string note;
};

struct WitnessReport {
  std::string method;                     // fidelity | homogeneous | reverse
  int n = 0;
  std::string verdict;                    // GME | fully-entangled | boundary | inconclusive
  std::vector<CertificationCheck> trace;

  // fidelity-method payload
  std::vector<double> stabilizer_expectations;
  std::vector<double> stabilizer_errors;
  double fidelity_bound = 0.0;
  double witness_value = 0.0;             // 5/8 - bound
  int lms_count = 0;

  // shot metadata
  long shots = 0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

// Evaluates the schedule, runs the merging argument and emits the trace.
// Verdict "fully-entangled" iff every check exceeds 1 and the merge closes.
// Readout errors scale each size-k check by (2 p_ms - 1)^k.
WitnessReport certify_full_entanglement(const MixedState& rho, int n, double p_ms = 1.0);
WitnessReport certify_full_entanglement(const PureState& psi, int n, double p_ms = 1.0);

// <X_theta^{tensor N}> with X_theta = cos(theta) X + sin(theta) Y.
double rotated_expectation(const MixedState& rho, double theta);
double rotated_expectation(const PureState& psi, double theta);

// Twirled state: the theta-average of U_theta^dag rho U_theta (numerical
// grid integration; test oracle for the symmetry argument).
MixedState twirl(const MixedState& rho, int grid_points);

// Stabilizer-bound pipeline on a state: expectations of all S_i', the bound,
// and the LMS grouping actually used. Readout errors (p_ms) scale exact
// expectations term-wise and flip sampled bitstrings on the shot path.
WitnessReport fidelity_witness(const MixedState& rho, long shots = 0, std::uint64_t seed = 0,
                               double p_ms = 1.0);
WitnessReport fidelity_witness(const PureState& psi, long shots = 0, std::uint64_t seed = 0,
                               double p_ms = 1.0);

// --- reverse evolution ---------------------------------------------------

struct GateNoise {
  // Depolarizing probability per sqrt(SWAP)^dag application. Reverse-step
  // sqrt(SWAP) gates are realized as (sqrt(SWAP)^dag)^3 and accumulate three
  // noise applications; phase steps are treated as noiseless tilt pulses.
  double p_depol = 0.0;
};

struct ReverseCheckpoint {
  std::string label;                      // phi1 ... phi5
  int gate_units = 0;                     // accumulated gate-time units
  double exact_fidelity = 0.0;            // Tr(rho_i Phi_i)
  double estimated_fidelity = 0.0;        // from the listed settings only
  std::vector<std::string> settings;
  bool symmetry_ok = true;                // <YY> ~ <XX> (or <YX> ~ -<XY>)
};

struct ReverseSeries {
  std::vector<ReverseCheckpoint> checkpoints;
  double inferred_psi_fidelity = 0.0;     // log-linear fit at the psi point
  double exact_psi_fidelity = 0.0;
  bool gme_by_inferred = false;           // inferred > 5/8
  nlohmann::json to_json() const;
};

// Runs prepare + reverse under per-gate depolarizing noise on the density
// matrix (n <= 12). shots = 0 uses exact setting expectations.
ReverseSeries reverse_fidelity_series(int n, const GateNoise& noise, long shots = 0,
                                      std::uint64_t seed = 0);

}  // namespace entlat
