#include "entlat/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

namespace entlat {

namespace {

// Rotations mapping each basis onto the computational (Z) axis.
Eigen::Matrix2cd basis_rotation(PauliLetter basis) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd m;
  switch (basis) {
    case PauliLetter::X:  // Hadamard
      m << s, s, s, -s;
      return m;
    case PauliLetter::Y:  // maps Y eigenstates to |0>, |1>
      m << s, Complex(0, -s), s, Complex(0, s);
      return m;
    case PauliLetter::Z:
      return Eigen::Matrix2cd::Identity();
    default:
      throw ConfigError("basis_rotation: identity is not a measurement basis");
  }
}

std::vector<double> outcome_probabilities(const PureState& state,
                                          const MeasurementSetting& setting) {
  PureState rotated = state;
  for (int s = 1; s <= state.n_qubits(); ++s) {
    const PauliLetter b = setting.basis[static_cast<std::size_t>(s - 1)];
    if (b != PauliLetter::Z) rotated = apply_single_qubit(rotated, basis_rotation(b), s);
  }
  const Vector& a = rotated.amplitudes();
  std::vector<double> p(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(a(i));
  return p;
}

std::vector<double> outcome_probabilities(const MixedState& state,
                                          const MeasurementSetting& setting) {
  MixedState rotated = state;
  for (int s = 1; s <= state.n_qubits(); ++s) {
    const PauliLetter b = setting.basis[static_cast<std::size_t>(s - 1)];
    if (b != PauliLetter::Z) rotated = apply_single_qubit(rotated, basis_rotation(b), s);
  }
  const Matrix& m = rotated.matrix();
  std::vector<double> p(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) p[static_cast<std::size_t>(i)] = std::real(m(i, i));
  return p;
}

ShotRecord sample_from_probs(std::vector<double> probs, const MeasurementSetting& setting,
                             int n, int shots, std::uint64_t seed) {
  if (shots < 1) throw ConfigError("sample: shots >= 1 required");
  std::vector<double> cdf(probs.size());
  double acc = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += std::max(0.0, probs[i]);
    cdf[i] = acc;
  }
  // normalize away rounding
  for (auto& c : cdf) c /= acc;
  cdf.back() = 1.0;

  std::mt19937_64 gen(seed);
  ShotRecord rec{setting, {}, seed, n};
  rec.outcomes.reserve(static_cast<std::size_t>(shots));
  for (int k = 0; k < shots; ++k) {
    const double u = rng::to_unit(gen());
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    rec.outcomes.push_back(static_cast<std::uint64_t>(std::distance(cdf.begin(), it)));
  }
  return rec;
}

constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
    if (i + 1 < bytes.size()) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
    if (i + 2 < bytes.size()) chunk |= bytes[i + 2];
    out.push_back(kB64[(chunk >> 18) & 63]);
    out.push_back(kB64[(chunk >> 12) & 63]);
    out.push_back(i + 1 < bytes.size() ? kB64[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < bytes.size() ? kB64[chunk & 63] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    if (c == '=') return -1;
    throw ConfigError("base64: invalid character");
  };
  if (text.size() % 4 != 0) throw ConfigError("base64: length not a multiple of 4");
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i + 3 < text.size(); i += 4) {
    const int v0 = value_of(text[i]), v1 = value_of(text[i + 1]);
    const int v2 = value_of(text[i + 2]), v3 = value_of(text[i + 3]);
    std::uint32_t chunk = (static_cast<std::uint32_t>(v0) << 18) | (static_cast<std::uint32_t>(v1) << 12);
    out.push_back(static_cast<std::uint8_t>((chunk >> 16) & 0xFF));
    if (v2 >= 0) {
      chunk |= static_cast<std::uint32_t>(v2) << 6;
      out.push_back(static_cast<std::uint8_t>((chunk >> 8) & 0xFF));
    }
    if (v3 >= 0) {
      chunk |= static_cast<std::uint32_t>(v3);
      out.push_back(static_cast<std::uint8_t>(chunk & 0xFF));
    }
  }
  return out;
}

}  // namespace

double rng::to_unit(std::uint64_t draw) {
  return static_cast<double>(draw >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 step over master + index
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ShotRecord sample(const PureState& state, const MeasurementSetting& setting, int shots,
                  std::uint64_t seed) {
  if (setting.n_qubits() != state.n_qubits()) throw ConfigError("sample: setting size mismatch");
  return sample_from_probs(outcome_probabilities(state, setting), setting, state.n_qubits(),
                           shots, seed);
}

ShotRecord sample(const MixedState& state, const MeasurementSetting& setting, int shots,
                  std::uint64_t seed) {
  if (setting.n_qubits() != state.n_qubits()) throw ConfigError("sample: setting size mismatch");
  return sample_from_probs(outcome_probabilities(state, setting), setting, state.n_qubits(),
                           shots, seed);
}

std::pair<double, double> estimate_pauli(const ShotRecord& record, const PauliString& string) {
  if (string.n_qubits() != record.n_qubits) throw ConfigError("estimate_pauli: size mismatch");
  if (!record.setting.resolves(string)) {
    throw ConfigError("estimate_pauli: string not resolvable by the record's setting");
  }
  if (record.outcomes.empty()) throw ConfigError("estimate_pauli: empty record");
  std::uint64_t support_mask = 0;
  for (int s : string.support()) {
    support_mask |= std::uint64_t{1} << bit_position(s, record.n_qubits);
  }
  const auto shots = static_cast<double>(record.outcomes.size());
  double sum = 0;
  for (std::uint64_t o : record.outcomes) {
    sum += (std::popcount(o & support_mask) & 1) ? -1.0 : 1.0;
  }
  const double mean = sum / shots;
  // parity outcomes are +-1: sample variance = (1 - mean^2) * shots/(shots-1)
  double var = 0.0;
  if (record.outcomes.size() > 1) {
    var = (1.0 - mean * mean) * shots / (shots - 1.0);
    var = std::max(0.0, var);
  }
  const double w = string.weight();
  return {w * mean, std::abs(w) * std::sqrt(var / shots)};
}

std::pair<double, double> estimate_sum(const std::vector<ShotRecord>& records,
                                       const PauliSum& sum) {
  double mean = 0, var = 0;
  for (const auto& term : sum.terms()) {
    const ShotRecord* chosen = nullptr;
    for (const auto& rec : records) {
      if (rec.setting.resolves(term)) { chosen = &rec; break; }
    }
    if (chosen == nullptr) {
      throw ConfigError("estimate_sum: term " + term.letters_str() + " unresolvable");
    }
    const auto [m, se] = estimate_pauli(*chosen, term);
    mean += m;
    var += se * se;
  }
  return {mean, std::sqrt(var)};
}

std::string ShotRecord::to_jsonl() const {
  std::vector<std::uint8_t> bytes;
  const int per = (n_qubits + 7) / 8;
  bytes.reserve(outcomes.size() * static_cast<std::size_t>(per));
  for (std::uint64_t o : outcomes) {
    for (int b = 0; b < per; ++b) bytes.push_back(static_cast<std::uint8_t>((o >> (8 * b)) & 0xFF));
  }
  nlohmann::json j = {
      {"setting", setting.str()},
      {"n", n_qubits},
      {"shots", shots()},
      {"seed", seed},
      {"outcomes_b64", base64_encode(bytes)},
  };
  return j.dump();
}

ShotRecord ShotRecord::from_jsonl(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  const int n = j.at("n").get<int>();
  ShotRecord rec{MeasurementSetting(n, j.at("setting").get<std::string>()), {},
                 j.at("seed").get<std::uint64_t>(), n};
  const auto bytes = base64_decode(j.at("outcomes_b64").get<std::string>());
  const int per = (n + 7) / 8;
  const int shots = j.at("shots").get<int>();
  if (static_cast<int>(bytes.size()) != shots * per) {
    throw ConfigError("ShotRecord::from_jsonl: byte count mismatch");
  }
  rec.outcomes.reserve(static_cast<std::size_t>(shots));
  for (int k = 0; k < shots; ++k) {
    std::uint64_t o = 0;
    for (int b = 0; b < per; ++b) {
      o |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(k * per + b)]) << (8 * b);
    }
    rec.outcomes.push_back(o);
  }
  return rec;
}

}  // namespace entlat
