#include "entlat/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "entlat/qstate.hpp"
#include "entlat/protocol.hpp"

namespace entlat {

namespace {

constexpr double kMergeTol = 1e-12;

Eigen::Matrix2cd letter_matrix(PauliLetter l) {
  Eigen::Matrix2cd m;
  switch (l) {
    case PauliLetter::I: m << 1, 0, 0, 1; break;
    case PauliLetter::X: m << 0, 1, 1, 0; break;
    case PauliLetter::Y: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case PauliLetter::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

// 4x4 matrix of P_a (site i) tensor P_b (site j) in the gate basis
// |00>,|10>,|01>,|11> (g = a + 2b): element[g', g] = A[a',a] * B[b',b].
Eigen::Matrix4cd pair_matrix(PauliLetter la, PauliLetter lb) {
  const Eigen::Matrix2cd A = letter_matrix(la);
  const Eigen::Matrix2cd B = letter_matrix(lb);
  Eigen::Matrix4cd m;
  for (int g_out = 0; g_out < 4; ++g_out) {
    for (int g_in = 0; g_in < 4; ++g_in) {
      const int ao = g_out & 1, bo = (g_out >> 1) & 1;
      const int ai = g_in & 1, bi = (g_in >> 1) & 1;
      m(g_out, g_in) = A(ao, ai) * B(bo, bi);
    }
  }
  return m;
}

int pair_index(PauliLetter a, PauliLetter b) {
  return static_cast<int>(a) * 4 + static_cast<int>(b);
}

}  // namespace

char letter_char(PauliLetter l) {
  switch (l) {
    case PauliLetter::I: return 'I';
    case PauliLetter::X: return 'X';
    case PauliLetter::Y: return 'Y';
    default: return 'Z';
  }
}

PauliLetter letter_from_char(char c) {
  switch (c) {
    case 'I': return PauliLetter::I;
    case 'X': return PauliLetter::X;
    case 'Y': return PauliLetter::Y;
    case 'Z': return PauliLetter::Z;
    default: throw ConfigError(std::string("unknown Pauli letter '") + c + "'");
  }
}

PauliString::PauliString(std::vector<PauliLetter> letters, double weight)
    : letters_(std::move(letters)), weight_(weight) {
  if (letters_.empty()) throw ConfigError("PauliString: empty letter list");
  if (weight_ == 0.0) throw ConfigError("PauliString: weight must be nonzero");
}

PauliString::PauliString(int n_qubits, const std::string& letters, double weight)
    : weight_(weight) {
  if (static_cast<int>(letters.size()) != n_qubits) {
    throw ConfigError("PauliString: letters length does not match n_qubits");
  }
  if (weight_ == 0.0) throw ConfigError("PauliString: weight must be nonzero");
  letters_.reserve(letters.size());
  for (char c : letters) letters_.push_back(letter_from_char(c));
}

std::string PauliString::letters_str() const {
  std::string s;
  s.reserve(letters_.size());
  for (auto l : letters_) s.push_back(letter_char(l));
  return s;
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (int s = 1; s <= n_qubits(); ++s) {
    if (letters_[s - 1] != PauliLetter::I) out.push_back(s);
  }
  return out;
}

int PauliString::pauli_weight() const {
  return static_cast<int>(std::count_if(letters_.begin(), letters_.end(),
                                        [](PauliLetter l) { return l != PauliLetter::I; }));
}

bool PauliString::is_identity() const { return pauli_weight() == 0; }

std::uint64_t PauliString::x_mask() const {
  std::uint64_t m = 0;
  for (int s = 1; s <= n_qubits(); ++s) {
    if (letters_[s - 1] == PauliLetter::X || letters_[s - 1] == PauliLetter::Y) {
      m |= std::uint64_t{1} << bit_position(s, n_qubits());
    }
  }
  return m;
}

std::uint64_t PauliString::zy_mask() const {
  std::uint64_t m = 0;
  for (int s = 1; s <= n_qubits(); ++s) {
    if (letters_[s - 1] == PauliLetter::Z || letters_[s - 1] == PauliLetter::Y) {
      m |= std::uint64_t{1} << bit_position(s, n_qubits());
    }
  }
  return m;
}

int PauliString::y_count() const {
  return static_cast<int>(std::count(letters_.begin(), letters_.end(), PauliLetter::Y));
}

PauliString PauliString::with_weight(double w) const { return PauliString(letters_, w); }

Matrix PauliString::dense() const {
  // site 1 owns the most significant bit: accumulate kron(m, p)
  Matrix m = Matrix::Identity(1, 1) * weight_;
  for (auto l : letters_) {
    const Eigen::Matrix2cd p = letter_matrix(l);
    Matrix next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        next.block(2 * r, 2 * c, 2, 2) = m(r, c) * p;
      }
    }
    m.swap(next);
  }
  return m;
}

PauliSum::PauliSum(PauliString term) : n_qubits_(term.n_qubits()) {
  terms_.push_back(std::move(term));
}

PauliSum::PauliSum(int n_qubits, std::vector<PauliString> terms)
    : n_qubits_(n_qubits), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.n_qubits() != n_qubits_) throw ConfigError("PauliSum: mixed register sizes");
  }
  canonicalize();
}

void PauliSum::add(const PauliString& term) {
  if (n_qubits_ == 0) n_qubits_ = term.n_qubits();
  if (term.n_qubits() != n_qubits_) throw ConfigError("PauliSum::add: register size mismatch");
  terms_.push_back(term);
  canonicalize();
}

void PauliSum::canonicalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const PauliString& a, const PauliString& b) { return letters_less(a, b); });
  std::vector<PauliString> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && same_letters(merged.back(), t)) {
      const double w = merged.back().weight() + t.weight();
      if (std::abs(w) <= kMergeTol) {
        merged.pop_back();
      } else {
        merged.back() = merged.back().with_weight(w);
      }
    } else if (std::abs(t.weight()) > kMergeTol) {
      merged.push_back(t);
    }
  }
  terms_ = std::move(merged);
}

double PauliSum::weight_norm_sq() const {
  double s = 0;
  for (const auto& t : terms_) s += t.weight() * t.weight();
  return s;
}

Matrix PauliSum::dense() const {
  const std::int64_t dim = std::int64_t{1} << n_qubits_;
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& t : terms_) m += t.dense();
  return m;
}

std::string PauliSum::to_text() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& t : terms_) {
    os << t.weight() << ' ' << t.letters_str() << '\n';
  }
  return os.str();
}

PauliSum PauliSum::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<PauliString> terms;
  int n = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double w;
    std::string letters;
    if (!(ls >> w >> letters)) throw ConfigError("PauliSum::from_text: malformed line '" + line + "'");
    if (n == 0) n = static_cast<int>(letters.size());
    terms.emplace_back(n, letters, w);
  }
  if (terms.empty()) throw ConfigError("PauliSum::from_text: no terms");
  return PauliSum(n, std::move(terms));
}

bool PauliSum::operator==(const PauliSum& other) const {
  if (n_qubits_ != other.n_qubits_ || terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!same_letters(terms_[i], other.terms_[i])) return false;
    if (std::abs(terms_[i].weight() - other.terms_[i].weight()) > kMergeTol) return false;
  }
  return true;
}

MeasurementSetting::MeasurementSetting(std::vector<PauliLetter> b) : basis(std::move(b)) {
  for (auto l : basis) {
    if (l == PauliLetter::I) throw ConfigError("MeasurementSetting: basis letter must be X, Y or Z");
  }
}

MeasurementSetting::MeasurementSetting(int n_qubits, const std::string& letters) {
  if (static_cast<int>(letters.size()) != n_qubits) {
    throw ConfigError("MeasurementSetting: letters length mismatch");
  }
  basis.reserve(letters.size());
  for (char c : letters) {
    const PauliLetter l = letter_from_char(c);
    if (l == PauliLetter::I) throw ConfigError("MeasurementSetting: basis letter must be X, Y or Z");
    basis.push_back(l);
  }
}

std::string MeasurementSetting::str() const {
  std::string s;
  s.reserve(basis.size());
  for (auto l : basis) s.push_back(letter_char(l));
  return s;
}

bool MeasurementSetting::resolves(const PauliString& term) const {
  if (term.n_qubits() != n_qubits()) return false;
  for (int s = 0; s < n_qubits(); ++s) {
    const PauliLetter l = term.letters()[static_cast<std::size_t>(s)];
    if (l != PauliLetter::I && l != basis[static_cast<std::size_t>(s)]) return false;
  }
  return true;
}

std::vector<PauliString> bell_stabilizers(int n) {
  if (n < 2 || n % 2 != 0) throw ConfigError("bell_stabilizers: n must be even and >= 2");
  std::vector<PauliString> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n / 2; ++k) {
    std::vector<PauliLetter> lx(static_cast<std::size_t>(n), PauliLetter::I);
    std::vector<PauliLetter> lz(static_cast<std::size_t>(n), PauliLetter::I);
    lx[static_cast<std::size_t>(2 * k - 2)] = PauliLetter::X;
    lx[static_cast<std::size_t>(2 * k - 1)] = PauliLetter::X;
    lz[static_cast<std::size_t>(2 * k - 2)] = PauliLetter::Z;
    lz[static_cast<std::size_t>(2 * k - 1)] = PauliLetter::Z;
    out.emplace_back(std::move(lx), 1.0);
    out.emplace_back(std::move(lz), -1.0);
  }
  return out;
}

PauliTransferTable PauliTransferTable::from_gate(const TwoQubitGate& gate) {
  PauliTransferTable table;
  std::array<Eigen::Matrix4cd, 16> basis;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      basis[static_cast<std::size_t>(a * 4 + b)] =
          pair_matrix(static_cast<PauliLetter>(a), static_cast<PauliLetter>(b));
    }
  }
  for (int in = 0; in < 16; ++in) {
    const Eigen::Matrix4cd rotated = gate.matrix * basis[static_cast<std::size_t>(in)] * gate.matrix.adjoint();
    for (int out = 0; out < 16; ++out) {
      const Complex c = (basis[static_cast<std::size_t>(out)].adjoint() * rotated).trace() / 4.0;
      if (std::abs(c.imag()) > tol::kNorm) {
        throw InvariantError("PauliTransferTable: non-real coefficient");
      }
      table.r_[static_cast<std::size_t>(out)][static_cast<std::size_t>(in)] = c.real();
    }
  }
  return table;
}

const PauliTransferTable& PauliTransferTable::sqrt_swap_dag() {
  static const PauliTransferTable table = from_gate(gates::sqrt_swap_dag());
  return table;
}

PauliSum conjugate_by_gate(const PauliString& s, const PauliTransferTable& table,
                           const std::vector<std::pair<int, int>>& gate_pairs) {
  const int n = s.n_qubits();
  std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
  for (const auto& [i, j] : gate_pairs) {
    if (i < 1 || i > n || j < 1 || j > n || i == j) throw ConfigError("conjugate_by_gate: bad pair");
    if (used[static_cast<std::size_t>(i)] || used[static_cast<std::size_t>(j)]) {
      throw ConfigError("conjugate_by_gate: overlapping gate pairs");
    }
    used[static_cast<std::size_t>(i)] = used[static_cast<std::size_t>(j)] = true;
  }

  // Working set: letter pattern -> weight.
  std::map<std::vector<PauliLetter>, double> current;
  current.emplace(s.letters(), s.weight());
  for (const auto& [i, j] : gate_pairs) {
    std::map<std::vector<PauliLetter>, double> next;
    for (const auto& [letters, w] : current) {
      const PauliLetter la = letters[static_cast<std::size_t>(i - 1)];
      const PauliLetter lb = letters[static_cast<std::size_t>(j - 1)];
      if (la == PauliLetter::I && lb == PauliLetter::I) {
        next[letters] += w;  // disjoint support: this gate cannot act
        continue;
      }
      const int in = pair_index(la, lb);
      for (int out = 0; out < 16; ++out) {
        const double c = table.coeff(out, in);
        if (std::abs(c) <= kMergeTol) continue;
        std::vector<PauliLetter> nl = letters;
        nl[static_cast<std::size_t>(i - 1)] = static_cast<PauliLetter>(out / 4);
        nl[static_cast<std::size_t>(j - 1)] = static_cast<PauliLetter>(out % 4);
        next[std::move(nl)] += w * c;
      }
    }
    current = std::move(next);
  }

  std::vector<PauliString> terms;
  terms.reserve(current.size());
  for (const auto& [letters, w] : current) {
    if (std::abs(w) > kMergeTol) terms.emplace_back(letters, w);
  }
  return PauliSum(n, std::move(terms));
}

PauliSum conjugate_by_sqrtswapdag(const PauliString& s,
                                  const std::vector<std::pair<int, int>>& gate_pairs) {
  return conjugate_by_gate(s, PauliTransferTable::sqrt_swap_dag(), gate_pairs);
}

PauliSum conjugate_by_sqrtswapdag(const PauliSum& s,
                                  const std::vector<std::pair<int, int>>& gate_pairs) {
  std::vector<PauliString> terms;
  for (const auto& t : s.terms()) {
    const PauliSum part = conjugate_by_sqrtswapdag(t, gate_pairs);
    terms.insert(terms.end(), part.terms().begin(), part.terms().end());
  }
  return PauliSum(s.n_qubits(), std::move(terms));
}

std::vector<PauliSum> conjugated_stabilizers(int n) {
  if (n < 4 || n % 2 != 0) throw ConfigError("conjugated_stabilizers: n must be even and >= 4");
  std::vector<std::pair<int, int>> pairs;
  for (int k = 1; k <= n / 2 - 1; ++k) pairs.emplace_back(2 * k, 2 * k + 1);
  std::vector<PauliSum> out;
  out.reserve(static_cast<std::size_t>(n));
  for (const auto& s : bell_stabilizers(n)) {
    // only gates touching the support act; keep the rest out of the expansion
    std::vector<std::pair<int, int>> overlapping;
    const auto supp = s.support();
    for (const auto& p : pairs) {
      if (std::binary_search(supp.begin(), supp.end(), p.first) ||
          std::binary_search(supp.begin(), supp.end(), p.second)) {
        overlapping.push_back(p);
      }
    }
    out.push_back(conjugate_by_sqrtswapdag(s, overlapping));
  }
  return out;
}

TermCensus census(const std::vector<PauliSum>& sums) {
  TermCensus c;
  std::set<std::string> distinct;
  for (const auto& s : sums) {
    c.per_stabilizer.push_back(s.size());
    c.raw_total += s.size();
    for (const auto& t : s.terms()) distinct.insert(t.letters_str());
  }
  c.distinct = distinct.size();
  return c;
}

namespace {

// Periodic selection: identical brace-choices at alternating second-layer
// pairs. The X family carries X on the unpaired boundary sites and
// one of {XX, YZ, ZY} per pair; the Z family uses Z and {ZZ, YX, XY}.
std::vector<MeasurementSetting> periodic_settings(int n) {
  const std::array<std::array<std::pair<PauliLetter, PauliLetter>, 3>, 2> choices = {{
      {{{PauliLetter::X, PauliLetter::X}, {PauliLetter::Y, PauliLetter::Z}, {PauliLetter::Z, PauliLetter::Y}}},
      {{{PauliLetter::Z, PauliLetter::Z}, {PauliLetter::Y, PauliLetter::X}, {PauliLetter::X, PauliLetter::Y}}},
  }};
  const std::array<PauliLetter, 2> fill = {PauliLetter::X, PauliLetter::Z};
  std::vector<std::pair<int, int>> pairs;
  for (int k = 1; k <= n / 2 - 1; ++k) pairs.emplace_back(2 * k, 2 * k + 1);

  std::vector<MeasurementSetting> settings;
  for (int fam = 0; fam < 2; ++fam) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        std::vector<PauliLetter> st(static_cast<std::size_t>(n), fill[static_cast<std::size_t>(fam)]);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
          const auto& c = choices[static_cast<std::size_t>(fam)][static_cast<std::size_t>(p % 2 == 0 ? a : b)];
          st[static_cast<std::size_t>(pairs[p].first - 1)] = c.first;
          st[static_cast<std::size_t>(pairs[p].second - 1)] = c.second;
        }
        MeasurementSetting ms(std::move(st));
        if (std::find(settings.begin(), settings.end(), ms) == settings.end()) {
          settings.push_back(std::move(ms));
        }
      }
    }
  }
  return settings;
}

bool is_conjugated_stabilizer_family(const std::vector<PauliSum>& sums, int n) {
  if (n < 4 || n % 2 != 0 || sums.size() != static_cast<std::size_t>(n)) return false;
  const std::vector<PauliSum> reference = conjugated_stabilizers(n);
  std::vector<bool> taken(reference.size(), false);
  for (const auto& s : sums) {
    bool found = false;
    for (std::size_t i = 0; i < reference.size(); ++i) {
      if (!taken[i] && reference[i] == s) {
        taken[i] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

bool settings_cover(const std::vector<MeasurementSetting>& settings,
                    const std::vector<PauliSum>& sums) {
  for (const auto& s : sums) {
    for (const auto& t : s.terms()) {
      bool ok = false;
      for (const auto& st : settings) {
        if (st.resolves(t)) { ok = true; break; }
      }
      if (!ok) return false;
    }
  }
  return true;
}

std::vector<MeasurementSetting> group_into_lms(const std::vector<PauliSum>& sums, int n) {
  for (const auto& s : sums) {
    if (s.n_qubits() != n) throw ConfigError("group_into_lms: sum size mismatch");
  }
  if (is_conjugated_stabilizer_family(sums, n)) {
    auto settings = periodic_settings(n);
    if (settings_cover(settings, sums)) return settings;
  }

  // Greedy qubit-wise-compatibility fallback. Candidates grow from each
  // uncovered seed term; the best candidate resolves the most uncovered
  // terms, ties broken by lexicographic setting order.
  std::vector<PauliString> uncovered;
  for (const auto& s : sums) {
    for (const auto& t : s.terms()) {
      bool dup = false;
      for (const auto& u : uncovered) {
        if (same_letters(u, t)) { dup = true; break; }
      }
      if (!dup) uncovered.push_back(t);
    }
  }
  std::sort(uncovered.begin(), uncovered.end(),
            [](const PauliString& a, const PauliString& b) { return letters_less(a, b); });

  std::vector<MeasurementSetting> result;
  while (!uncovered.empty()) {
    MeasurementSetting best(std::vector<PauliLetter>(static_cast<std::size_t>(n), PauliLetter::Z));
    std::size_t best_count = 0;
    bool have_best = false;
    for (const auto& seed : uncovered) {
      std::vector<PauliLetter> partial = seed.letters();  // I = not yet assigned
      for (const auto& t : uncovered) {
        bool compatible = true;
        for (int q = 0; q < n && compatible; ++q) {
          const PauliLetter lt = t.letters()[static_cast<std::size_t>(q)];
          const PauliLetter lp = partial[static_cast<std::size_t>(q)];
          if (lt != PauliLetter::I && lp != PauliLetter::I && lt != lp) compatible = false;
        }
        if (!compatible) continue;
        for (int q = 0; q < n; ++q) {
          const PauliLetter lt = t.letters()[static_cast<std::size_t>(q)];
          if (lt != PauliLetter::I) partial[static_cast<std::size_t>(q)] = lt;
        }
      }
      for (auto& l : partial) {
        if (l == PauliLetter::I) l = PauliLetter::Z;  // deterministic filler
      }
      MeasurementSetting cand(std::move(partial));
      std::size_t count = 0;
      for (const auto& t : uncovered) {
        if (cand.resolves(t)) ++count;
      }
      if (!have_best || count > best_count || (count == best_count && cand < best)) {
        best = std::move(cand);
        best_count = count;
        have_best = true;
      }
    }
    result.push_back(best);
    std::erase_if(uncovered, [&](const PauliString& t) { return best.resolves(t); });
  }
  return result;
}

}  // namespace entlat
