#include <doctest.h>

#include <cmath>
#include <random>

#include "entlat/estimator.hpp"
#include "entlat/protocol.hpp"

using namespace entlat;

namespace {

MeasurementSetting uniform_setting(int n, char basis) {
  return MeasurementSetting(n, std::string(static_cast<std::size_t>(n), basis));
}

PureState random_state(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Vector v(std::int64_t{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(dist(gen), dist(gen));
  v.normalize();
  return PureState(n, v);
}

}  // namespace

TEST_CASE("Z-basis sampling of an eigenstate is deterministic") {
  const PureState s = PureState::basis_state(4, 0b1010);
  const ShotRecord rec = sample(s, uniform_setting(4, 'Z'), 64, 1);
  for (std::uint64_t o : rec.outcomes) CHECK(o == 0b1010);
  const auto [mean, err] = estimate_pauli(rec, PauliString(4, "ZZZZ", 1.0));
  CHECK(mean == doctest::Approx(1.0));
  CHECK(err == 0.0);
}

TEST_CASE("X-basis sampling of a Bell pair gives perfectly correlated pairs") {
  Vector bell = Vector::Zero(4);
  bell(0b01) = bell(0b10) = 1.0 / std::sqrt(2.0);
  const ShotRecord rec = sample(PureState(2, bell), uniform_setting(2, 'X'), 500, 7);
  const auto [mean, err] = estimate_pauli(rec, PauliString(2, "XX", 1.0));
  CHECK(mean == doctest::Approx(1.0));
  CHECK(err == 0.0);
}

TEST_CASE("Z^N on the target is a deterministic parity") {
  // the target only supports half-filled basis states, so every Z-basis
  // outcome carries the same parity: the estimate is exact at any shot count
  const PureState psi = target_state(6);
  const ShotRecord rec = sample(psi, uniform_setting(6, 'Z'), 50, 11);
  const auto [mean, err] = estimate_pauli(rec, PauliString(6, "ZZZZZZ", 1.0));
  CHECK(mean == doctest::Approx(-1.0));
  CHECK(err == 0.0);
}

TEST_CASE("standard error shrinks at the 1/sqrt(shots) rate") {
  const PureState psi = target_state(6);
  const PauliString obs(6, "ZZIIII", 1.0);  // <Z1 Z2> = -1/2 on the target
  const ShotRecord small = sample(psi, uniform_setting(6, 'Z'), 200, 11);
  const ShotRecord large = sample(psi, uniform_setting(6, 'Z'), 20000, 13);
  const auto [m1, e1] = estimate_pauli(small, obs);
  const auto [m2, e2] = estimate_pauli(large, obs);
  const double exact = expectation(psi, obs);
  CHECK(std::abs(m1 - exact) <= 5.0 * e1);
  CHECK(std::abs(m2 - exact) <= 5.0 * e2);
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(10.0).epsilon(0.35));  // sqrt(20000/200)
}

TEST_CASE("estimate_pauli edge cases") {
  const PureState s = PureState::basis_state(3, 0b010);
  const ShotRecord rec = sample(s, uniform_setting(3, 'Z'), 10, 3);
  // identity string: mean exactly one
  const auto [mean, err] = estimate_pauli(rec, PauliString(3, "III", 1.0));
  CHECK(mean == 1.0);
  CHECK(err == 0.0);
  // weighted string scales mean and stderr
  const auto [wm, we] = estimate_pauli(rec, PauliString(3, "ZIZ", -0.5));
  CHECK(wm == doctest::Approx(-0.5));
  CHECK(we == 0.0);
  // unresolvable string
  CHECK_THROWS_AS(estimate_pauli(rec, PauliString(3, "XII", 1.0)), ConfigError);
}

TEST_CASE("estimates track exact expectations on random 6-qubit states") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const PureState s = random_state(6, 40 + seed);
    const ShotRecord rec = sample(s, uniform_setting(6, 'Y'), 100000, 60 + seed);
    const PauliString obs(6, "YYIIYI", 1.0);
    const auto [mean, err] = estimate_pauli(rec, obs);
    const double exact = expectation(s, obs);
    CHECK(std::abs(mean - exact) <= 3.0 * std::max(err, 1e-4));
  }
}

TEST_CASE("estimation is unbiased across seeds") {
  const PureState s = random_state(4, 99);
  const PauliString obs(4, "XXII", 1.0);
  const double exact = expectation(s, obs);
  double acc = 0;
  const int n_seeds = 100;
  const int shots = 2000;
  double stderr_one = 0;
  for (int k = 0; k < n_seeds; ++k) {
    const ShotRecord rec = sample(s, uniform_setting(4, 'X'), shots, 1000 + static_cast<std::uint64_t>(k));
    const auto [mean, err] = estimate_pauli(rec, obs);
    acc += mean;
    stderr_one = err;
  }
  const double grand_mean = acc / n_seeds;
  CHECK(std::abs(grand_mean - exact) <= 5.0 * stderr_one / std::sqrt(static_cast<double>(n_seeds)));
}

TEST_CASE("marginal frequencies converge to single-site probabilities") {
  const PureState s = random_state(5, 123);
  const int shots = 50000;
  const ShotRecord rec = sample(s, uniform_setting(5, 'Z'), shots, 5);
  for (int site = 1; site <= 5; ++site) {
    double p1 = 0;
    const Vector& a = s.amplitudes();
    for (std::uint64_t b = 0; b < 32; ++b) {
      if (bit_of(b, site, 5)) p1 += std::norm(a(static_cast<Eigen::Index>(b)));
    }
    long hits = 0;
    for (std::uint64_t o : rec.outcomes) hits += bit_of(o, site, 5);
    const double freq = static_cast<double>(hits) / shots;
    CHECK(std::abs(freq - p1) < 5.0 * std::sqrt(std::max(p1 * (1 - p1), 1e-4) / shots));
  }
}

TEST_CASE("sampling is deterministic per seed and differs across seeds") {
  const PureState psi = target_state(4);
  const ShotRecord a = sample(psi, uniform_setting(4, 'X'), 50, 42);
  const ShotRecord b = sample(psi, uniform_setting(4, 'X'), 50, 42);
  const ShotRecord c = sample(psi, uniform_setting(4, 'X'), 50, 43);
  CHECK(a.outcomes == b.outcomes);
  CHECK(a.outcomes != c.outcomes);
}

TEST_CASE("mixed-state sampling matches the pure route for a projector") {
  const PureState psi = target_state(4);
  const ShotRecord a = sample(psi, uniform_setting(4, 'Z'), 200, 77);
  const ShotRecord b = sample(psi.to_density_matrix(), uniform_setting(4, 'Z'), 200, 77);
  CHECK(a.outcomes == b.outcomes);
}

TEST_CASE("estimate_sum combines terms across records") {
  const PureState psi = target_state(4);
  const auto stabilizers = conjugated_stabilizers(4);
  const auto settings = group_into_lms(stabilizers, 4);
  std::vector<ShotRecord> records;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    records.push_back(sample(psi, settings[i], 40000, derive_seed(5, i)));
  }
  for (const auto& s : stabilizers) {
    const auto [mean, err] = estimate_sum(records, s);
    CHECK(std::abs(mean - 1.0) <= 4.0 * std::max(err, 1e-3));
  }
  // maximally mixed state: all stabilizer estimates are zero-consistent
  const MixedState mm = MixedState::maximally_mixed(4);
  std::vector<ShotRecord> mm_records;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    mm_records.push_back(sample(mm, settings[i], 40000, derive_seed(6, i)));
  }
  for (const auto& s : stabilizers) {
    const auto [mean, err] = estimate_sum(mm_records, s);
    CHECK(std::abs(mean) <= 4.0 * std::max(err, 1e-3));
  }
  // unresolvable term
  CHECK_THROWS_AS(estimate_sum({records[0]}, PauliSum(PauliString(4, "YIII", 1.0))),
                  ConfigError);
}

TEST_CASE("white-noise stabilizer estimates land at 1 - p") {
  const int n = 4;
  const double p = 0.4;
  Matrix rho = (1 - p) * (target_state(n).amplitudes() * target_state(n).amplitudes().adjoint());
  rho += p / 16.0 * Matrix::Identity(16, 16);
  const MixedState noisy(n, rho);
  const auto stabilizers = conjugated_stabilizers(n);
  const auto settings = group_into_lms(stabilizers, n);
  std::vector<ShotRecord> records;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    records.push_back(sample(noisy, settings[i], 60000, derive_seed(9, i)));
  }
  for (const auto& s : stabilizers) {
    const auto [mean, err] = estimate_sum(records, s);
    CHECK(std::abs(mean - (1 - p)) <= 4.0 * std::max(err, 1e-3));
  }
}

TEST_CASE("shot records round-trip through JSON lines") {
  const PureState psi = target_state(4);
  const ShotRecord rec = sample(psi, uniform_setting(4, 'Y'), 137, 2024);
  const ShotRecord back = ShotRecord::from_jsonl(rec.to_jsonl());
  CHECK(back.setting == rec.setting);
  CHECK(back.outcomes == rec.outcomes);
  CHECK(back.seed == rec.seed);
  CHECK(back.n_qubits == rec.n_qubits);

  // ten qubits need two packed bytes per outcome
  const PureState wide = target_state(10);
  const ShotRecord rec10 = sample(wide, uniform_setting(10, 'X'), 53, 99);
  const ShotRecord back10 = ShotRecord::from_jsonl(rec10.to_jsonl());
  CHECK(back10.outcomes == rec10.outcomes);
}
