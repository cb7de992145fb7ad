#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqpf/linalg.hpp"

namespace sqpf {

inline constexpr int kMaxQubits = 20;

/// Pure n-qubit state. Basis index bit (n-1) is the first qubit of the first register.
class StateVector {
 public:
  /// Throws DimensionError for a non power-of-two length or more than kMaxQubits,
  /// ConsistencyError when the norm is off by more than 1e-9.
  explicit StateVector(VectorXcd amplitudes);

  static StateVector basis(int n_qubits, std::size_t index = 0);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  const VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

 private:
  int n_qubits_ = 0;
  VectorXcd amplitudes_;
};

/// Dense unitary, checked on construction (Frobenius residual of U^H U - I).
class UnitaryMatrix {
 public:
  static constexpr double kDefaultTolerance = 1e-10;

  explicit UnitaryMatrix(MatrixXcd entries, double tolerance = kDefaultTolerance);

  static UnitaryMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const MatrixXcd& matrix() const noexcept { return entries_; }
  UnitaryMatrix adjoint() const;
  double residual() const { return unitarity_residual(entries_); }

 private:
  MatrixXcd entries_;
};

UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b);

StateVector apply(const UnitaryMatrix& u, const StateVector& s);

double probability_of(const StateVector& s, std::size_t basis_index);

/// Exact measurement distribution over all basis states.
Eigen::VectorXd probabilities(const StateVector& s);

/// Multinomial measurement counts from `shots` seeded draws.
std::vector<std::uint64_t> sample_counts(const StateVector& s, std::uint64_t shots,
                                         std::uint64_t rng_seed);

/// Basis label, most significant qubit first ("0101").
std::string bitstring(std::size_t index, int n_qubits);

}  // namespace sqpf
