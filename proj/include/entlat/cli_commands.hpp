#pragma once

// Reproducible experiment drivers behind the CLI subcommands. Kept in the
// library so tests can call them directly.

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "entlat/noise.hpp"

namespace entlat {

struct RunConfig {
  std::string subcommand;
  int n = 10;
  NoiseParams noise;
  long shots = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string method;   // witness: fidelity | homogeneous | reverse
  std::string figure;   // sweep: fig5a | fig5b | fig5c | hubbard
  std::string out_path;
  std::string format = "json";  // csv | json

  void validate() const;
};

// Exit codes used by the CLI front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInvariant = 3;

// Target-state summary: support check, per-cut Schmidt data, RDM purities.
nlohmann::json cmd_prepare(const RunConfig& config);

// Runs one of the three detection pipelines end to end.
nlohmann::json cmd_witness(const RunConfig& config);

struct SweepOutput {
  std::string csv;
  nlohmann::json sidecar;
};

// Emits the figure curve families (fig5a/fig5b/fig5c) or the Hubbard gate
// sweep CSV (v_over_j,t,gate_fidelity,leakage).
SweepOutput cmd_sweep(const RunConfig& config);

// The subsystem list of the error analysis for N qubits (sizes 2..n-2 in
// steps of two, each size twice: the contiguous block and its staggered
// variant) plus the whole system.
std::vector<std::vector<int>> error_analysis_subsets(int n);

void write_file(const std::string& path, const std::string& contents);

}  // namespace entlat
