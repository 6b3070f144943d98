#pragma once

// Finite-shot sampling in local measurement settings and Pauli expectation
// estimation from the sampled bitstrings.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "entlat/pauli.hpp"
#include "entlat/qstate.hpp"

namespace entlat {

struct ShotRecord {
  MeasurementSetting setting;
  std::vector<std::uint64_t> outcomes;  // one bitstring per shot, site 1 = MSB
  std::uint64_t seed = 0;
  int n_qubits = 0;

  int shots() const { return static_cast<int>(outcomes.size()); }

  // JSON lines object with base64-packed outcome bits; round-trips exactly.
  std::string to_jsonl() const;
  static ShotRecord from_jsonl(const std::string& line);
};

// Born-rule sampling after per-site basis rotation. Deterministic per seed.
ShotRecord sample(const PureState& state, const MeasurementSetting& setting, int shots,
                  std::uint64_t seed);
ShotRecord sample(const MixedState& state, const MeasurementSetting& setting, int shots,
                  std::uint64_t seed);

// Outcome-parity mean and standard error (sample sd / sqrt(shots)) for a
// string resolvable by the record's setting; the string's weight scales both.
std::pair<double, double> estimate_pauli(const ShotRecord& record, const PauliString& string);

// Weighted combination of per-term estimates across records; each term uses
// the first record that resolves it. Standard errors combined in quadrature.
std::pair<double, double> estimate_sum(const std::vector<ShotRecord>& records,
                                       const PauliSum& sum);

// Derives the per-record stream from a master seed and the record index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

namespace rng {

// Deterministic uniform double in [0, 1) from a raw 64-bit draw; avoids
// implementation-defined std::uniform_real_distribution.
double to_unit(std::uint64_t draw);

}  // namespace rng

}  // namespace entlat
