#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace entlat {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Centralized numerical tolerances.
namespace tol {
// Norm, trace, Hermiticity and unitarity checks.
inline constexpr double kNorm = 1e-12;
// Density-matrix eigenvalues may dip this far below zero.
inline constexpr double kEigenFloor = -1e-10;
// Comparison of derived physical values.
inline constexpr double kValue = 1e-9;
}  // namespace tol

// Invalid user-facing input (bad qubit count, out-of-range probability, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical invariant was violated (non-unitary gate, broken norm, ...).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Site s (1-based, site 1 = most significant bit) -> bit position in a basis
// index of an n-qubit register.
inline int bit_position(int site, int n_qubits) { return n_qubits - site; }

inline int bit_of(std::uint64_t index, int site, int n_qubits) {
  return static_cast<int>((index >> bit_position(site, n_qubits)) & 1ULL);
}

}  // namespace entlat
