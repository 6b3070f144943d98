#pragma once

// Pauli-string algebra: Bell-pair stabilizers, conjugation by sqrt(SWAP)^dag
// into weighted Pauli sums, and grouping into local measurement settings.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "entlat/common.hpp"

namespace entlat {

struct TwoQubitGate;

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char letter_char(PauliLetter l);
PauliLetter letter_from_char(char c);

// Weighted tensor product of single-site Paulis. weight must be nonzero.
class PauliString {
 public:
  PauliString(std::vector<PauliLetter> letters, double weight);
  PauliString(int n_qubits, const std::string& letters, double weight);

  int n_qubits() const { return static_cast<int>(letters_.size()); }
  double weight() const { return weight_; }
  PauliLetter letter(int site) const { return letters_[site - 1]; }
  const std::vector<PauliLetter>& letters() const { return letters_; }
  std::string letters_str() const;

  std::vector<int> support() const;    // sites with non-identity letters
  int pauli_weight() const;            // number of non-identity letters
  bool is_identity() const;

  // Bit masks over basis indices (site 1 = MSB); used by expectation kernels.
  std::uint64_t x_mask() const;        // sites with X or Y
  std::uint64_t zy_mask() const;       // sites with Z or Y
  int y_count() const;

  PauliString with_weight(double w) const;
  Matrix dense() const;                // 2^n x 2^n, small n only

  friend bool same_letters(const PauliString& a, const PauliString& b) {
    return a.letters_ == b.letters_;
  }
  // Lexicographic order on letters, then weight; gives canonical term order.
  friend bool letters_less(const PauliString& a, const PauliString& b) {
    return a.letters_ < b.letters_;
  }

 private:
  std::vector<PauliLetter> letters_;
  double weight_;
};

// Real-weighted sum of distinct Pauli strings (a Hermitian operator).
// Canonical form: terms sorted lexicographically, duplicates merged, terms
// with |weight| <= 1e-12 dropped.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_qubits_(n_qubits) {}
  explicit PauliSum(PauliString term);
  PauliSum(int n_qubits, std::vector<PauliString> terms);

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliString>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  void add(const PauliString& term);

  double weight_norm_sq() const;  // sum of squared weights
  Matrix dense() const;

  // One term per line: "<weight> <letters>", e.g. "0.5 XIXZ".
  std::string to_text() const;
  static PauliSum from_text(const std::string& text);

  bool operator==(const PauliSum& other) const;

 private:
  void canonicalize();

  int n_qubits_ = 0;
  std::vector<PauliString> terms_;
};

// One single-qubit measurement basis per site.
struct MeasurementSetting {
  std::vector<PauliLetter> basis;  // entries in {X, Y, Z}

  explicit MeasurementSetting(std::vector<PauliLetter> b);
  MeasurementSetting(int n_qubits, const std::string& letters);

  int n_qubits() const { return static_cast<int>(basis.size()); }
  std::string str() const;

  // A term is resolvable iff each non-identity letter matches the basis.
  bool resolves(const PauliString& term) const;

  bool operator==(const MeasurementSetting& other) const { return basis == other.basis; }
  bool operator<(const MeasurementSetting& other) const { return basis < other.basis; }
};

// S_{2k-1} = X X and S_{2k} = -Z Z on the Bell pairs (2k-1, 2k), k = 1..n/2.
std::vector<PauliString> bell_stabilizers(int n);

// How conjugation by a fixed two-qubit gate rotates the 16-dim two-qubit
// Pauli basis: U (P_a tensor P_b) U^dag = sum_cd R[cd][ab] P_c tensor P_d.
// Exactly real for any unitary U.
class PauliTransferTable {
 public:
  static PauliTransferTable from_gate(const TwoQubitGate& gate);
  static const PauliTransferTable& sqrt_swap_dag();  // precomputed singleton

  double coeff(int out_pair, int in_pair) const { return r_[out_pair][in_pair]; }

 private:
  std::array<std::array<double, 16>, 16> r_{};
};

// Exact operator identity U S U^dag with U the product of the gate over the
// given disjoint pairs. Pairs not overlapping the support leave S unchanged.
PauliSum conjugate_by_gate(const PauliString& s, const PauliTransferTable& table,
                           const std::vector<std::pair<int, int>>& gate_pairs);

PauliSum conjugate_by_sqrtswapdag(const PauliString& s,
                                  const std::vector<std::pair<int, int>>& gate_pairs);
PauliSum conjugate_by_sqrtswapdag(const PauliSum& s,
                                  const std::vector<std::pair<int, int>>& gate_pairs);

// All N conjugated stabilizers S_i' = U S_i U^dag with the second-layer
// pairs (2k, 2k+1), k = 1..n/2-1. Requires even n >= 4.
std::vector<PauliSum> conjugated_stabilizers(int n);

struct TermCensus {
  std::vector<std::size_t> per_stabilizer;
  std::size_t raw_total = 0;    // with multiplicity across stabilizers
  std::size_t distinct = 0;     // deduplicated letter patterns
};
TermCensus census(const std::vector<PauliSum>& sums);

// Covers every term of every sum with local measurement settings. Emits the
// periodic construction (identical brace-choices at alternating pairs) when
// the input is the conjugated-stabilizer family, otherwise falls back to a
// deterministic greedy cover.
std::vector<MeasurementSetting> group_into_lms(const std::vector<PauliSum>& sums, int n);

// Direct check that each term of each sum is resolvable by >= 1 setting.
bool settings_cover(const std::vector<MeasurementSetting>& settings,
                    const std::vector<PauliSum>& sums);

}  // namespace entlat
