#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "entlat/detect.hpp"
#include "entlat/noise.hpp"
#include "entlat/protocol.hpp"

using namespace entlat;

namespace {

PureState random_state(int n, std::mt19937_64& gen) {
  std::normal_distribution<double> dist;
  Vector v(std::int64_t{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(dist(gen), dist(gen));
  v.normalize();
  return PureState(n, v);
}

MixedState random_mixed(int n, std::mt19937_64& gen, int rank) {
  std::normal_distribution<double> dist;
  const std::int64_t dim = std::int64_t{1} << n;
  Matrix g(dim, rank);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < rank; ++c) g(r, c) = Complex(dist(gen), dist(gen));
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return MixedState(n, rho);
}

// random pure product state across the single-boundary cut after site k1
PureState random_product(int n, int k1, std::mt19937_64& gen) {
  const PureState a = random_state(k1, gen);
  const PureState b = random_state(n - k1, gen);
  Vector v(std::int64_t{1} << n);
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
    for (Eigen::Index j = 0; j < b.amplitudes().size(); ++j) {
      v((i << (n - k1)) + j) = a.amplitudes()(i) * b.amplitudes()(j);
    }
  }
  return PureState(n, v);
}

}  // namespace

TEST_CASE("gme witness") {
  const PureState psi = target_state(6);
  CHECK(gme_witness(psi) == doctest::Approx(-3.0 / 8.0).epsilon(1e-12));

  // pure product states across any single boundary stay non-negative
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int k1 = 1 + static_cast<int>(gen() % 5);
    const PureState prod = random_product(6, k1, gen);
    CHECK(gme_witness(prod) >= -1e-10);
  }
}

TEST_CASE("fidelity lower bound") {
  CHECK(fidelity_lower_bound(std::vector<double>(6, 1.0), 6) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fidelity_lower_bound({1.0, 1.0}, 6), ConfigError);
  CHECK_THROWS_AS(fidelity_lower_bound(std::vector<double>(6, 1.2), 6), ConfigError);

  // white noise: bound = 1 - N p / 2, crossing 5/8 at p = 3/(4N)
  const int n = 10;
  for (double p : {0.0, 0.03, 0.075, 0.2}) {
    std::vector<double> e(n, 1.0 - p);
    CHECK(fidelity_lower_bound(e, n) == doctest::Approx(1.0 - n * p / 2.0).epsilon(1e-12));
  }

  // never exceeds the exact fidelity on random mixed states
  std::mt19937_64 gen(33);
  const PureState psi = target_state(6);
  const auto stabilizers = conjugated_stabilizers(6);
  for (int trial = 0; trial < 50; ++trial) {
    const MixedState rho = random_mixed(6, gen, 3);
    std::vector<double> e;
    for (const auto& s : stabilizers) e.push_back(std::clamp(expectation(rho, s), -1.0, 1.0));
    CHECK(fidelity_lower_bound(e, 6) <= fidelity(rho, psi) + 1e-9);
  }
}

TEST_CASE("homogeneous values on the target") {
  const PureState psi10 = target_state(10);
  for (const auto& subset : std::vector<std::vector<int>>{{1, 2}, {1, 3}, {1, 2, 3, 4}, {9, 10}}) {
    CHECK(homogeneous_value(psi10, subset).value == doctest::Approx(1.5).epsilon(1e-10));
  }
  std::vector<int> whole;
  for (int s = 1; s <= 10; ++s) whole.push_back(s);
  const HomogeneousResult all = homogeneous_value(psi10, whole);
  CHECK(all.value == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(all.raw[2] == doctest::Approx(-1.0).epsilon(1e-10));  // <Z^10> = (-1)^5

  // the along-chain neighbours are genuinely unentangled: values recorded
  const PureState psi6 = target_state(6);
  CHECK(homogeneous_value(psi6, {2, 3}).value == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(homogeneous_value(psi6, {3, 4}).value == doctest::Approx(0.75).epsilon(1e-10));

  // product pair: only ZZ contributes
  CHECK(homogeneous_value(PureState::basis_state(4, 0b0100), {1, 2}).value ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(homogeneous_value(psi6, {1, 2, 3}), ConfigError);
}

TEST_CASE("certification schedule instances at n = 6 and n = 10") {
  const auto s6 = certification_schedule(6);
  const std::vector<std::vector<int>> expect6 = {
      {1, 2}, {1, 3}, {1, 2, 3, 4}, {1, 2, 3, 5}, {4, 6}, {5, 6}};
  CHECK(s6 == expect6);

  const auto s10 = certification_schedule(10);
  const std::vector<std::vector<int>> expect10 = {
      {1, 2}, {1, 3}, {1, 2, 3, 4}, {1, 2, 3, 5}, {1, 2, 3, 4, 5, 6}, {1, 2, 3, 4, 5, 7},
      {8, 10}, {9, 10}, {7, 8, 9, 10}};
  CHECK(s10 == expect10);

  CHECK_THROWS_AS(certification_schedule(4), ConfigError);
}

TEST_CASE("full-entanglement certification") {
  SUBCASE("perfect targets certify") {
    for (int n : {6, 8, 10}) {
      const WitnessReport report = certify_full_entanglement(target_state(n), n);
      CHECK(report.verdict == "fully-entangled");
      for (const auto& check : report.trace) {
        CHECK(check.violated);
        CHECK(check.homogeneous.value == doctest::Approx(1.5).epsilon(1e-9));
      }
    }
  }

  SUBCASE("maximally mixed is inconclusive with zero values") {
    const WitnessReport report = certify_full_entanglement(MixedState::maximally_mixed(6), 6);
    CHECK(report.verdict == "inconclusive");
    for (const auto& check : report.trace) {
      CHECK(check.homogeneous.value < 1e-10);
    }
  }

  SUBCASE("trace is machine-checkable: merges close over all sites") {
    const WitnessReport report = certify_full_entanglement(target_state(6), 6);
    std::vector<bool> seen(7, false);
    for (const auto& check : report.trace) {
      for (int s : check.merged_sites) seen[static_cast<std::size_t>(s)] = true;
    }
    for (int s = 1; s <= 6; ++s) CHECK(seen[static_cast<std::size_t>(s)]);
    const nlohmann::json j = report.to_json();
    CHECK(j["trace"].size() == report.trace.size());
    CHECK(j["verdict"] == "fully-entangled");
  }
}

TEST_CASE("anticommutativity bound holds on random odd-odd product states") {
  std::mt19937_64 gen(55);
  for (int k : {4, 6}) {
    for (int trial = 0; trial < 100; ++trial) {
      const int k1 = (k == 4) ? (trial % 2 ? 1 : 3) : (1 + 2 * static_cast<int>(gen() % 3));
      const PureState prod = random_product(k, k1, gen);
      std::vector<int> all;
      for (int s = 1; s <= k; ++s) all.push_back(s);
      CHECK(homogeneous_value(prod, all).value <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("stabilizer bound operator is positive semidefinite at n = 4") {
  const int n = 4;
  const PureState psi = target_state(n);
  const std::int64_t dim = 16;
  Matrix op = psi.amplitudes() * psi.amplitudes().adjoint();
  for (const auto& s : conjugated_stabilizers(n)) op -= 0.5 * s.dense();
  op += (n / 2.0 - 1.0) * Matrix::Identity(dim, dim);
  Eigen::SelfAdjointEigenSolver<Matrix> es(op, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("rotated expectations and twirling") {
  const PureState psi = target_state(6);
  const double at_zero = rotated_expectation(psi, 0.0);
  CHECK(at_zero == doctest::Approx(expectation(psi, PauliString(6, "XXXXXX", 1.0))).epsilon(1e-12));
  CHECK(at_zero == doctest::Approx(1.0).epsilon(1e-10));

  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = 2.0 * std::numbers::pi * rng::to_unit(gen());
    CHECK(std::abs(rotated_expectation(psi, theta) - at_zero) < 1e-10);
  }
  // theta = pi/2 is the Y measurement
  CHECK(rotated_expectation(psi, std::numbers::pi / 2) ==
        doctest::Approx(expectation(psi, PauliString(6, "YYYYYY", 1.0))).epsilon(1e-10));

  // grid-averaged rotated expectation equals the twirled-state expectation
  const int n = 4;
  std::mt19937_64 gen2(78);
  const MixedState rho = random_mixed(n, gen2, 2);
  const int grid = 64;
  double avg = 0;
  for (int g = 0; g < grid; ++g) {
    avg += rotated_expectation(rho, 2.0 * std::numbers::pi * g / grid);
  }
  avg /= grid;
  const MixedState sym = twirl(rho, grid);
  CHECK(avg == doctest::Approx(expectation(sym, PauliString(n, "XXXX", 1.0))).epsilon(1e-9));
  // Z-string expectations are twirl-invariant
  CHECK(expectation(sym, PauliString(n, "ZZZZ", 1.0)) ==
        doctest::Approx(expectation(rho, PauliString(n, "ZZZZ", 1.0))).epsilon(1e-9));
}

TEST_CASE("fidelity witness pipeline") {
  SUBCASE("exact on the target") {
    const WitnessReport report = fidelity_witness(target_state(6));
    CHECK(report.method == "fidelity");
    CHECK(report.lms_count == 18);
    CHECK(report.fidelity_bound == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(report.verdict == "GME");
    for (double e : report.stabilizer_expectations) CHECK(e == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("white noise at threshold reports boundary") {
    const PureState psi = target_state(6);
    const WitnessReport report = fidelity_witness(white_noise(psi, 3.0 / 24.0));
    CHECK(report.verdict == "boundary");
    CHECK(report.fidelity_bound == doctest::Approx(5.0 / 8.0).epsilon(1e-10));
  }

  SUBCASE("shot-based run stays consistent with the exact bound") {
    const PureState psi = target_state(6);
    const MixedState noisy = white_noise(psi, 0.05);
    const WitnessReport exact = fidelity_witness(noisy);
    const WitnessReport sampled = fidelity_witness(noisy, 20000, 99);
    double err = 0;
    for (double e : sampled.stabilizer_errors) err += e;
    CHECK(std::abs(sampled.fidelity_bound - exact.fidelity_bound) <= 3.0 * std::max(err, 1e-3));
    CHECK(sampled.shots == 20000);
  }
}

TEST_CASE("Bell-pair fidelity formula is exact on twirled-family states") {
  // product of per-pair Werner states: q |bell><bell| + (1-q) I/4; these are
  // Bell-diagonal so <YY> = <XX> holds and the two-setting formula is exact
  Vector bell = Vector::Zero(4);
  bell(0b01) = bell(0b10) = 1.0 / std::sqrt(2.0);
  const Matrix proj = bell * bell.adjoint();
  const auto werner = [&](double q) { return q * proj + (1 - q) * Matrix::Identity(4, 4) / 4.0; };

  const double q1 = 0.83, q2 = 0.61;
  const Matrix w1 = werner(q1), w2 = werner(q2);
  Matrix rho = Matrix::Zero(16, 16);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int c = 0; c < 4; ++c) {
        for (int d = 0; d < 4; ++d) {
          rho(a * 4 + c, b * 4 + d) = w1(a, b) * w2(c, d);
        }
      }
    }
  }
  const MixedState state(4, rho);
  Vector bell_prod(16);
  for (int a = 0; a < 4; ++a) {
    for (int c = 0; c < 4; ++c) bell_prod(a * 4 + c) = bell(a) * bell(c);
  }
  const double exact = fidelity(state, PureState(4, bell_prod));

  double formula = 1.0;
  for (int k = 1; k <= 2; ++k) {
    std::vector<PauliLetter> xx(4, PauliLetter::I), zz(4, PauliLetter::I), yy(4, PauliLetter::I);
    xx[2 * k - 2] = xx[2 * k - 1] = PauliLetter::X;
    zz[2 * k - 2] = zz[2 * k - 1] = PauliLetter::Z;
    yy[2 * k - 2] = yy[2 * k - 1] = PauliLetter::Y;
    const double exx = expectation(state, PauliString(xx, 1.0));
    const double ezz = expectation(state, PauliString(zz, 1.0));
    CHECK(expectation(state, PauliString(yy, 1.0)) == doctest::Approx(exx).epsilon(1e-12));
    formula *= 0.25 * (1.0 + 2.0 * exx - ezz);
  }
  CHECK(formula == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("reverse fidelity series") {
  SUBCASE("noiseless run is unit-fidelity everywhere") {
    const ReverseSeries series = reverse_fidelity_series(6, GateNoise{0.0});
    REQUIRE(series.checkpoints.size() == 7);
    for (const auto& cp : series.checkpoints) {
      CHECK(cp.exact_fidelity == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(cp.estimated_fidelity == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(cp.symmetry_ok);
    }
    CHECK(series.inferred_psi_fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(series.gme_by_inferred);
  }

  SUBCASE("depolarizing gates: fidelity non-increasing along 3 -> 4 -> 5") {
    const ReverseSeries series = reverse_fidelity_series(6, GateNoise{0.01});
    double psi_f = 0, phi4_f = 0, phi5_f = 0;
    for (const auto& cp : series.checkpoints) {
      if (cp.label == "psi") psi_f = cp.exact_fidelity;
      if (cp.label == "phi4") phi4_f = cp.exact_fidelity;
      if (cp.label == "phi5") phi5_f = cp.exact_fidelity;
    }
    CHECK(psi_f > phi4_f);
    CHECK(phi4_f > phi5_f);
    CHECK(series.inferred_psi_fidelity < 1.0);
    CHECK(series.exact_psi_fidelity == doctest::Approx(psi_f));
  }

  SUBCASE("estimated fidelities track the exact ones at mild noise") {
    const ReverseSeries series = reverse_fidelity_series(6, GateNoise{0.005});
    for (const auto& cp : series.checkpoints) {
      if (cp.label == "psi") continue;
      CHECK(cp.symmetry_ok);
      CHECK(std::abs(cp.estimated_fidelity - cp.exact_fidelity) < 0.05);
    }
  }
}
