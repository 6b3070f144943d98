#include <doctest.h>

#include <complex>
#include <random>

#include "entlat/pauli.hpp"
#include "entlat/protocol.hpp"
#include "entlat/qstate.hpp"

using namespace entlat;

namespace {

PureState random_state(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Vector v(std::int64_t{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(dist(gen), dist(gen));
  v.normalize();
  return PureState(n, v);
}

MixedState random_mixed(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  const std::int64_t dim = std::int64_t{1} << n;
  Matrix g(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) g(r, c) = Complex(dist(gen), dist(gen));
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return MixedState(n, rho);
}

}  // namespace

TEST_CASE("basis states and invariants") {
  const PureState s = PureState::basis_state(3, 0b101);
  CHECK(s.n_qubits() == 3);
  CHECK(s.amplitude(0b101) == Complex(1, 0));
  CHECK(s.norm_error() == doctest::Approx(0.0));

  Vector bad = Vector::Zero(8);
  bad(0) = 0.5;
  CHECK_THROWS_AS(PureState(3, bad), InvariantError);
  CHECK_THROWS_AS(PureState::basis_state(0, 0), ConfigError);
}

TEST_CASE("sqrt(SWAP)^dag on |10> matches the displayed matrix row") {
  // pair in isolation: |10> -> (1-i)/2 |10> + (1+i)/2 |01>
  const PureState in = PureState::basis_state(2, 0b10);
  const PureState out = apply_gate(in, gates::sqrt_swap_dag(), 1, 2);
  CHECK(std::abs(out.amplitude(0b10) - Complex(0.5, -0.5)) < tol::kNorm);
  CHECK(std::abs(out.amplitude(0b01) - Complex(0.5, 0.5)) < tol::kNorm);
  CHECK(std::abs(out.amplitude(0b00)) < tol::kNorm);
  CHECK(std::abs(out.amplitude(0b11)) < tol::kNorm);
}

TEST_CASE("identity gate leaves states unchanged") {
  const PureState s = random_state(4, 7);
  const PureState out = apply_gate(s, gates::identity(), 2, 4);
  CHECK((out.amplitudes() - s.amplitudes()).norm() < tol::kNorm);
}

TEST_CASE("sqrt(SWAP) then sqrt(SWAP)^dag restores a random state") {
  const PureState s = random_state(5, 11);
  PureState out = apply_gate(s, gates::sqrt_swap(), 2, 3);
  out = apply_gate(out, gates::sqrt_swap_dag(), 2, 3);
  CHECK(out.overlap_sq(s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((out.amplitudes() - s.amplitudes()).norm() < 1e-12);
}

TEST_CASE("gate application rejects bad sites") {
  const PureState s = random_state(3, 3);
  CHECK_THROWS_AS(apply_gate(s, gates::identity(), 0, 2), ConfigError);
  CHECK_THROWS_AS(apply_gate(s, gates::identity(), 1, 4), ConfigError);
  CHECK_THROWS_AS(apply_gate(s, gates::identity(), 2, 2), ConfigError);
}

TEST_CASE("gate application preserves norm and trace on randomized inputs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PureState s = random_state(4, 100 + seed);
    const PureState out = apply_gate(s, gates::sqrt_swap_dag(), 1, 3);
    CHECK(out.norm_error() < tol::kNorm);

    const MixedState m = random_mixed(3, 200 + seed);
    const MixedState mo = apply_gate(m, gates::sqrt_swap_dag(), 1, 2);
    CHECK(mo.trace_error() < tol::kNorm);
    CHECK(mo.hermiticity_error() < tol::kNorm);
  }
}

TEST_CASE("rho12 of sqswapdag_23 (Bell12 x Bell34) is half Bell, half maximally mixed") {
  Vector bell = Vector::Zero(4);
  bell(0b01) = bell(0b10) = 1.0 / std::sqrt(2.0);
  Vector prod = Vector::Zero(16);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      prod(a * 4 + b) = bell(a) * bell(b);
    }
  }
  PureState state(4, prod);
  state = apply_gate(state, gates::sqrt_swap_dag(), 2, 3);
  const MixedState r12 = reduced_density_matrix(state, {1, 2});

  const Matrix bell_proj = bell * bell.adjoint();
  const Matrix expected = 0.5 * bell_proj + 0.5 * Matrix::Identity(4, 4) / 4.0;
  CHECK((r12.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);

  // purity = sum of the squared Bell-diagonal eigenvalues {5/8, 1/8, 1/8, 1/8}
  CHECK(purity(r12) == doctest::Approx(7.0 / 16.0).epsilon(1e-12));
  // any pure state has unit purity
  CHECK(purity(state.to_density_matrix()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partial trace edge cases") {
  const PureState s = random_state(3, 17);
  const MixedState full = reduced_density_matrix(s, {1, 2, 3});
  CHECK((full.matrix() - s.to_density_matrix().matrix()).cwiseAbs().maxCoeff() < tol::kNorm);

  Vector bell = Vector::Zero(4);
  bell(0b01) = bell(0b10) = 1.0 / std::sqrt(2.0);
  const MixedState one = reduced_density_matrix(PureState(2, bell), {1});
  CHECK((one.matrix() - Matrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff() < tol::kNorm);

  CHECK_THROWS_AS(reduced_density_matrix(s, {}), ConfigError);
  CHECK_THROWS_AS(reduced_density_matrix(s, {4}), ConfigError);
}

TEST_CASE("partial trace of a mixed state matches the pure-state route") {
  const PureState s = random_state(5, 23);
  const MixedState direct = reduced_density_matrix(s, {2, 4});
  const MixedState via_dm = reduced_density_matrix(s.to_density_matrix(), {2, 4});
  CHECK((direct.matrix() - via_dm.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("schmidt spectrum of a Bell pair and consistency properties") {
  Vector bell = Vector::Zero(4);
  bell(0b01) = bell(0b10) = 1.0 / std::sqrt(2.0);
  const auto lam = schmidt_spectrum(PureState(2, bell), Bipartition({1}, 2));
  REQUIRE(lam.size() == 2);
  CHECK(lam[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lam[1] == doctest::Approx(0.5).epsilon(1e-12));

  // random state: spectrum sums to one, RDM purities agree on both sides
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PureState s = random_state(6, 300 + seed);
    const Bipartition cut({1, 3, 4}, 6);
    const auto spec = schmidt_spectrum(s, cut);
    double total = 0, sumsq = 0;
    for (double l : spec) { total += l; sumsq += l * l; }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(purity(reduced_density_matrix(s, {1, 3, 4})) == doctest::Approx(sumsq).epsilon(1e-9));
    CHECK(purity(reduced_density_matrix(s, {2, 5, 6})) == doctest::Approx(sumsq).epsilon(1e-9));
  }
}

TEST_CASE("fidelity: two computation routes agree; white-noise closed form") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PureState psi = random_state(4, 400 + seed);
    const MixedState rho = random_mixed(4, 500 + seed);
    const double via_tr = fidelity(rho, psi);
    // vector-overlap route: <psi| rho |psi> as projector trace
    const Matrix proj = psi.amplitudes() * psi.amplitudes().adjoint();
    const double via_proj = std::real((rho.matrix() * proj).trace());
    CHECK(via_tr == doctest::Approx(via_proj).epsilon(1e-12));
  }

  const PureState psi = target_state(6);
  const double p = 0.3;
  Matrix rho = (1 - p) * (psi.amplitudes() * psi.amplitudes().adjoint()) +
               p / 64.0 * Matrix::Identity(64, 64);
  CHECK(fidelity(MixedState(6, rho), psi) ==
        doctest::Approx((1 - p) + p / 64.0).epsilon(1e-12));
}

TEST_CASE("Neel state overlaps with the target stay below the GME bound") {
  const PureState neel = neel_state(4);
  const PureState psi = target_state(4);
  const double f = fidelity(neel, psi);
  CHECK(f < 5.0 / 8.0);
}

TEST_CASE("expectation values: basic identities") {
  const PureState psi = target_state(6);
  // every supported basis state has exactly n/2 down spins
  CHECK(expectation(psi, PauliString(6, "ZZZZZZ", 1.0)) == doctest::Approx(-1.0).epsilon(1e-12));

  Vector bell = Vector::Zero(4);
  bell(0b01) = bell(0b10) = 1.0 / std::sqrt(2.0);
  CHECK(expectation(PureState(2, bell), PauliString(2, "XX", 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // maximally mixed: every non-identity string vanishes
  const MixedState mm = MixedState::maximally_mixed(4);
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::string letters;
    bool nontrivial = false;
    for (int s = 0; s < 4; ++s) {
      const char c = "IXYZ"[gen() % 4];
      letters.push_back(c);
      nontrivial |= (c != 'I');
    }
    if (!nontrivial) continue;
    CHECK(std::abs(expectation(mm, PauliString(4, letters, 1.0))) < tol::kNorm);
  }
}

TEST_CASE("expectation matches the dense-matrix oracle on random states") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 15; ++trial) {
    const PureState s = random_state(4, 600 + static_cast<std::uint64_t>(trial));
    std::string letters;
    for (int q = 0; q < 4; ++q) letters.push_back("IXYZ"[gen() % 4]);
    const PauliString p(4, letters, 1.0);
    const double fast = expectation(s, p);
    const Complex dense =
        (s.amplitudes().adjoint() * p.dense() * s.amplitudes())(0);
    CHECK(fast == doctest::Approx(std::real(dense)).epsilon(1e-11));

    const MixedState m = random_mixed(4, 700 + static_cast<std::uint64_t>(trial));
    const double fast_m = expectation(m, p);
    CHECK(fast_m == doctest::Approx(std::real((m.matrix() * p.dense()).trace())).epsilon(1e-11));
  }
}

TEST_CASE("mixed state validation") {
  CHECK_THROWS_AS(MixedState(2, Matrix::Identity(4, 4)), InvariantError);  // trace 4
  Matrix nonherm = Matrix::Identity(4, 4) / 4.0;
  nonherm(0, 1) = Complex(0, 1e-3);
  CHECK_THROWS_AS(MixedState(2, nonherm), InvariantError);
  const MixedState ok = MixedState::maximally_mixed(2);
  CHECK(ok.min_eigenvalue() == doctest::Approx(0.25).epsilon(1e-12));
}
