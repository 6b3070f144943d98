#include "entlat/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "entlat/pauli.hpp"
#include "entlat/protocol.hpp"

namespace entlat {

namespace {

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(name) + " must lie in [0, 1]");
  }
}

std::uint64_t neel_index(int n) {
  std::uint64_t idx = 0;
  for (int site = 1; site <= n; ++site) idx = (idx << 1) | static_cast<std::uint64_t>(site % 2);
  return idx;
}

template <typename StateT>
StateT run_generation(StateT state, int n) {
  for (const auto& [i, j] : layer1_pairs(n)) state = apply_gate(state, gates::sqrt_swap_dag(), i, j);
  for (const auto& [i, j] : layer1_pairs(n)) state = apply_gate(state, gates::phase(), i, j);
  for (const auto& [i, j] : layer2_pairs(n)) state = apply_gate(state, gates::sqrt_swap_dag(), i, j);
  return state;
}

PauliString homogeneous_string(int n, const std::vector<int>& subset, PauliLetter o) {
  std::vector<PauliLetter> letters(static_cast<std::size_t>(n), PauliLetter::I);
  for (int s : subset) letters[static_cast<std::size_t>(s - 1)] = o;
  return PauliString(std::move(letters), 1.0);
}

std::string subset_label(const std::vector<int>& subset) {
  std::ostringstream os;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) os << '+';
    os << subset[i];
  }
  return os.str();
}

// Exact evaluator for the noisy pipeline at n <= 10: evolves every
// computational basis state once, then every grid point is a weighted sum
// over flip patterns. Exactly equals the density-matrix path by linearity.
class ExpectationTable {
 public:
  ExpectationTable(int n, const std::vector<std::vector<int>>& subsets) : n_(n) {
    const std::int64_t dim = std::int64_t{1} << n;
    std::vector<PureState> evolved;
    evolved.reserve(static_cast<std::size_t>(dim));
    for (std::int64_t b = 0; b < dim; ++b) {
      evolved.push_back(run_generation(PureState::basis_state(n, static_cast<std::uint64_t>(b)), n));
    }
    const std::uint64_t neel = neel_index(n);
    hamming_.resize(static_cast<std::size_t>(dim));
    for (std::int64_t b = 0; b < dim; ++b) {
      hamming_[static_cast<std::size_t>(b)] = std::popcount(static_cast<std::uint64_t>(b) ^ neel);
    }
    for (const auto& subset : subsets) {
      for (PauliLetter o : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
        const PauliString obs = homogeneous_string(n, subset, o);
        std::vector<double> ent(static_cast<std::size_t>(dim));
        std::vector<double> prod(static_cast<std::size_t>(dim), 0.0);
        for (std::int64_t b = 0; b < dim; ++b) {
          ent[static_cast<std::size_t>(b)] = expectation(evolved[static_cast<std::size_t>(b)], obs);
        }
        if (o == PauliLetter::Z) {
          // computational basis states: only Z-strings survive
          const std::uint64_t zmask = obs.zy_mask();
          for (std::int64_t b = 0; b < dim; ++b) {
            prod[static_cast<std::size_t>(b)] =
                (std::popcount(static_cast<std::uint64_t>(b) & zmask) & 1) ? -1.0 : 1.0;
          }
        }
        entangled_.push_back(std::move(ent));
        product_.push_back(std::move(prod));
      }
    }
  }

  // index = 3 * subset_index + letter_index (X=0, Y=1, Z=2)
  std::pair<double, double> expectations(std::size_t index, double p_sf) const {
    const auto dim = static_cast<std::int64_t>(hamming_.size());
    std::vector<double> w(static_cast<std::size_t>(dim));
    for (std::int64_t b = 0; b < dim; ++b) {
      const int h = hamming_[static_cast<std::size_t>(b)];
      w[static_cast<std::size_t>(b)] = std::pow(p_sf, n_ - h) * std::pow(1.0 - p_sf, h);
    }
    double e_ent = 0, e_prod = 0;
    for (std::int64_t b = 0; b < dim; ++b) {
      e_ent += w[static_cast<std::size_t>(b)] * entangled_[index][static_cast<std::size_t>(b)];
      e_prod += w[static_cast<std::size_t>(b)] * product_[index][static_cast<std::size_t>(b)];
    }
    return {e_ent, e_prod};
  }

 private:
  int n_;
  std::vector<int> hamming_;
  std::vector<std::vector<double>> entangled_;
  std::vector<std::vector<double>> product_;
};

}  // namespace

void NoiseParams::validate() const {
  check_prob(p_white, "p_white");
  check_prob(p_sf, "p_sf");
  check_prob(p_ms, "p_ms");
  check_prob(p_es, "p_es");
}

MixedState white_noise(const PureState& psi, double p) {
  check_prob(p, "p");
  const std::int64_t dim = psi.dim();
  Matrix rho = (1.0 - p) * (psi.amplitudes() * psi.amplitudes().adjoint());
  rho += p / static_cast<double>(dim) * Matrix::Identity(dim, dim);
  return StateBuilder::mixed(psi.n_qubits(), std::move(rho));
}

MixedState spin_flip_preparation(int n, double p_sf) {
  if (n < 2 || n % 2 != 0) throw ConfigError("spin_flip_preparation: even n required");
  if (n > kMaxMixedQubits) throw ConfigError("spin_flip_preparation: register too large");
  check_prob(p_sf, "p_sf");
  const std::int64_t dim = std::int64_t{1} << n;
  const std::uint64_t neel = neel_index(n);
  Matrix rho = Matrix::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    const int h = std::popcount(static_cast<std::uint64_t>(b) ^ neel);
    rho(b, b) = std::pow(p_sf, n - h) * std::pow(1.0 - p_sf, h);
  }
  return StateBuilder::mixed(n, std::move(rho));
}

double measurement_flip_scale(int pauli_weight, double p_ms) {
  check_prob(p_ms, "p_ms");
  return std::pow(2.0 * p_ms - 1.0, pauli_weight);
}

ShotRecord measurement_flip(const ShotRecord& record, double p_ms, std::uint64_t seed) {
  check_prob(p_ms, "p_ms");
  std::mt19937_64 gen(seed);
  ShotRecord out = record;
  for (auto& o : out.outcomes) {
    for (int s = 0; s < record.n_qubits; ++s) {
      if (rng::to_unit(gen()) < 1.0 - p_ms) o ^= std::uint64_t{1} << s;
    }
  }
  return out;
}

MixedState entangling_depolarize(const MixedState& state_perfect, double p_es) {
  check_prob(p_es, "p_es");
  const std::int64_t dim = state_perfect.dim();
  Matrix rho = p_es * state_perfect.matrix();
  rho += (1.0 - p_es) / static_cast<double>(dim) * Matrix::Identity(dim, dim);
  return StateBuilder::mixed(state_perfect.n_qubits(), std::move(rho));
}

MixedState noisy_prepared_state(int n, const NoiseParams& params, EsFailure mode) {
  params.validate();
  const MixedState init = spin_flip_preparation(n, params.p_sf);
  MixedState evolved = run_generation(init, n);
  if (params.p_white > 0) {
    const std::int64_t dim = evolved.dim();
    Matrix rho = (1.0 - params.p_white) * evolved.matrix();
    rho += params.p_white / static_cast<double>(dim) * Matrix::Identity(dim, dim);
    evolved = StateBuilder::mixed(n, std::move(rho));
  }
  if (params.p_es >= 1.0) return evolved;
  if (mode == EsFailure::kMaximallyMixed) {
    return entangling_depolarize(evolved, params.p_es);
  }
  Matrix rho = params.p_es * evolved.matrix() + (1.0 - params.p_es) * init.matrix();
  return StateBuilder::mixed(n, std::move(rho));
}

MixedState apply_gate_depolarized(const MixedState& state, const TwoQubitGate& gate, int i,
                                  int j, double p_depol) {
  check_prob(p_depol, "p_depol");
  MixedState out = apply_gate(state, gate, i, j);
  if (p_depol == 0.0) return out;
  // (1-p) rho + p (I_4/4 tensor Tr_{ij} rho)
  const int n = state.n_qubits();
  std::vector<int> others;
  for (int s = 1; s <= n; ++s) {
    if (s != i && s != j) others.push_back(s);
  }
  const MixedState rest = reduced_density_matrix(out, others);
  const std::int64_t dim = std::int64_t{1} << n;
  Matrix mixed_part = Matrix::Zero(dim, dim);
  const int k = static_cast<int>(others.size());
  for (std::int64_t r = 0; r < (std::int64_t{1} << k); ++r) {
    for (std::int64_t c = 0; c < (std::int64_t{1} << k); ++c) {
      const Complex val = rest.matrix()(r, c) * 0.25;
      // scatter others bits, sum over the (i, j) diagonal
      std::uint64_t base_r = 0, base_c = 0;
      for (int p = 0; p < k; ++p) {
        if ((r >> (k - 1 - p)) & 1) base_r |= std::uint64_t{1} << bit_position(others[static_cast<std::size_t>(p)], n);
        if ((c >> (k - 1 - p)) & 1) base_c |= std::uint64_t{1} << bit_position(others[static_cast<std::size_t>(p)], n);
      }
      for (int gi = 0; gi < 4; ++gi) {
        std::uint64_t add = 0;
        if (gi & 1) add |= std::uint64_t{1} << bit_position(i, n);
        if (gi & 2) add |= std::uint64_t{1} << bit_position(j, n);
        mixed_part(static_cast<Eigen::Index>(base_r | add), static_cast<Eigen::Index>(base_c | add)) += val;
      }
    }
  }
  Matrix rho = (1.0 - p_depol) * out.matrix() + p_depol * mixed_part;
  return StateBuilder::mixed(n, std::move(rho));
}

SampledHomogeneous sampled_homogeneous(int n, const NoiseParams& params, EsFailure mode,
                                       const std::vector<std::vector<int>>& subsets,
                                       long shots, std::uint64_t seed) {
  params.validate();
  if (n < 2 || n % 2 != 0 || n > kMaxPureQubits) throw ConfigError("sampled_homogeneous: bad n");
  if (shots < 1) throw ConfigError("sampled_homogeneous: shots >= 1 required");
  const std::uint64_t neel = neel_index(n);

  SampledHomogeneous result;
  result.expectations.resize(subsets.size());
  result.witness.assign(subsets.size(), {0.0, 0.0});

  std::vector<std::uint64_t> support_masks;
  support_masks.reserve(subsets.size());
  for (const auto& subset : subsets) {
    std::uint64_t m = 0;
    for (int s : subset) m |= std::uint64_t{1} << bit_position(s, n);
    support_masks.push_back(m);
  }

  const std::array<PauliLetter, 3> letters = {PauliLetter::X, PauliLetter::Y, PauliLetter::Z};
  for (int li = 0; li < 3; ++li) {
    std::mt19937_64 gen(derive_seed(seed, static_cast<std::uint64_t>(li)));
    const MeasurementSetting setting(
        std::vector<PauliLetter>(static_cast<std::size_t>(n), letters[static_cast<std::size_t>(li)]));

    // One trajectory per shot: draw the flip pattern and the entangling coin,
    // then group identical (pattern, success) trajectories so each distinct
    // pattern is evolved and sampled only once.
    std::map<std::uint64_t, long> ok_counts;
    std::map<std::uint64_t, long> skip_counts;  // failure branch, state untouched
    long mixed_count = 0;                       // failure branch, maximally mixed
    for (long s = 0; s < shots; ++s) {
      std::uint64_t pattern = neel;
      for (int q = 0; q < n; ++q) {
        if (rng::to_unit(gen()) < 1.0 - params.p_sf) pattern ^= std::uint64_t{1} << q;
      }
      if (rng::to_unit(gen()) < params.p_es) {
        ++ok_counts[pattern];
      } else if (mode == EsFailure::kSkipEntangling) {
        ++skip_counts[pattern];
      } else {
        ++mixed_count;
      }
    }

    std::vector<std::uint64_t> outcomes;
    outcomes.reserve(static_cast<std::size_t>(shots));
    std::uint64_t stream = 1;
    for (const auto& [pattern, count] : ok_counts) {
      const PureState evolved = run_generation(PureState::basis_state(n, pattern), n);
      const ShotRecord rec = sample(evolved, setting, static_cast<int>(count),
                                    derive_seed(gen(), stream++));
      outcomes.insert(outcomes.end(), rec.outcomes.begin(), rec.outcomes.end());
    }
    for (const auto& [pattern, count] : skip_counts) {
      // a computational basis state measured in X or Y gives uniform bits;
      // measured in Z it returns the pattern itself
      if (letters[static_cast<std::size_t>(li)] == PauliLetter::Z) {
        outcomes.insert(outcomes.end(), static_cast<std::size_t>(count), pattern);
      } else {
        for (long c = 0; c < count; ++c) {
          outcomes.push_back(gen() & ((std::uint64_t{1} << n) - 1));
        }
      }
    }
    for (long c = 0; c < mixed_count; ++c) {
      outcomes.push_back(gen() & ((std::uint64_t{1} << n) - 1));
    }

    if (params.p_ms < 1.0) {
      for (auto& o : outcomes) {
        for (int q = 0; q < n; ++q) {
          if (rng::to_unit(gen()) < 1.0 - params.p_ms) o ^= std::uint64_t{1} << q;
        }
      }
    }

    for (std::size_t si = 0; si < subsets.size(); ++si) {
      double sum = 0;
      for (std::uint64_t o : outcomes) {
        sum += (std::popcount(o & support_masks[si]) & 1) ? -1.0 : 1.0;
      }
      const double mean = sum / static_cast<double>(shots);
      double var = 0.0;
      if (shots > 1) {
        var = std::max(0.0, (1.0 - mean * mean) * static_cast<double>(shots) /
                                static_cast<double>(shots - 1));
      }
      const double se = std::sqrt(var / static_cast<double>(shots));
      result.expectations[si][static_cast<std::size_t>(li)] = {mean, se};
      result.witness[si].first += std::abs(mean);
      result.witness[si].second += se * se;
    }
  }
  for (auto& [value, var] : result.witness) var = std::sqrt(var);
  return result;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (step <= 0 || hi < lo) throw ConfigError("uniform_grid: bad bounds");
  std::vector<double> g;
  const long count = std::lround((hi - lo) / step);
  for (long i = 0; i <= count; ++i) g.push_back(lo + static_cast<double>(i) * step);
  if (std::abs(g.back() - hi) > 1e-12) g.push_back(hi);
  return g;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  spec.fixed.validate();
  if (spec.grid.empty()) throw ConfigError("sweep: empty grid");
  if (spec.param != "p_sf" && spec.param != "p_ms" && spec.param != "p_es" &&
      spec.param != "p_white") {
    throw ConfigError("sweep: unknown parameter '" + spec.param + "'");
  }
  for (double v : spec.grid) check_prob(v, spec.param.c_str());
  if (spec.n < 4 || spec.n % 2 != 0) throw ConfigError("sweep: even n >= 4 required");

  std::vector<SweepRow> rows;

  if (spec.param == "p_white") {
    // stabilizer-bound pipeline: e_i(p) = (1-p) <S_i'>_psi since every
    // conjugated-stabilizer term is traceless
    const PureState psi = target_state(spec.n);
    const auto stabs = conjugated_stabilizers(spec.n);
    std::vector<double> base;
    base.reserve(stabs.size());
    for (const auto& s : stabs) base.push_back(expectation(psi, s));
    for (double p : spec.grid) {
      double bound = 0;
      for (double e : base) bound += 0.5 * (1.0 - p) * e;
      bound -= spec.n / 2.0 - 1.0;
      rows.push_back({spec.param, p, "bound", bound, 0.0});
    }
    return rows;
  }

  if (spec.subsets.empty()) throw ConfigError("sweep: no subsets given");

  // shot path: pure-state trajectories; serves registers beyond the
  // density-matrix limit
  if (spec.shots > 0) {
    for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
      NoiseParams p = spec.fixed;
      if (spec.param == "p_sf") p.p_sf = spec.grid[gi];
      if (spec.param == "p_ms") p.p_ms = spec.grid[gi];
      if (spec.param == "p_es") p.p_es = spec.grid[gi];
      const auto est = sampled_homogeneous(spec.n, p, spec.es_mode, spec.subsets, spec.shots,
                                           derive_seed(spec.seed, gi));
      for (std::size_t si = 0; si < spec.subsets.size(); ++si) {
        rows.push_back({spec.param, spec.grid[gi], subset_label(spec.subsets[si]),
                        est.witness[si].first, est.witness[si].second});
      }
    }
    return rows;
  }

  if (spec.n > 10) throw ConfigError("sweep: exact path supports n <= 10; use shots");
  const ExpectationTable table(spec.n, spec.subsets);
  for (double v : spec.grid) {
    NoiseParams p = spec.fixed;
    if (spec.param == "p_sf") p.p_sf = v;
    if (spec.param == "p_ms") p.p_ms = v;
    if (spec.param == "p_es") p.p_es = v;
    for (std::size_t si = 0; si < spec.subsets.size(); ++si) {
      const int k = static_cast<int>(spec.subsets[si].size());
      const double ms = measurement_flip_scale(k, p.p_ms);
      double total = 0;
      for (int li = 0; li < 3; ++li) {
        const auto [e_ent, e_prod] = table.expectations(3 * si + static_cast<std::size_t>(li), p.p_sf);
        const double fail = spec.es_mode == EsFailure::kSkipEntangling ? e_prod : 0.0;
        total += std::abs(ms * (p.p_es * e_ent + (1.0 - p.p_es) * fail));
      }
      rows.push_back({spec.param, v, subset_label(spec.subsets[si]), total, 0.0});
    }
  }
  return rows;
}

std::optional<double> crossing_threshold(const std::vector<SweepRow>& rows,
                                         const std::string& subset_label_, double target) {
  std::vector<const SweepRow*> series;
  for (const auto& r : rows) {
    if (r.subset == subset_label_) series.push_back(&r);
  }
  if (series.size() < 2) return std::nullopt;
  std::sort(series.begin(), series.end(),
            [](const SweepRow* a, const SweepRow* b) { return a->value < b->value; });
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const double y0 = series[i]->witness_value - target;
    const double y1 = series[i + 1]->witness_value - target;
    if (y0 == 0.0) return series[i]->value;
    if (y0 * y1 < 0) {
      const double t = y0 / (y0 - y1);
      return series[i]->value + t * (series[i + 1]->value - series[i]->value);
    }
  }
  if (series.back()->witness_value == target) return series.back()->value;
  return std::nullopt;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "param,value,subset,witness_value,stderr\n";
  char buf[64];
  for (const auto& r : rows) {
    os << r.param << ',';
    std::snprintf(buf, sizeof buf, "%.12g", r.value);
    os << buf << ',' << r.subset << ',';
    std::snprintf(buf, sizeof buf, "%.12g", r.witness_value);
    os << buf << ',';
    std::snprintf(buf, sizeof buf, "%.12g", r.std_err);
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace entlat
