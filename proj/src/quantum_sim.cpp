#include "sqpf/quantum_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqpf/errors.hpp"
#include "sqpf/rng.hpp"

namespace sqpf {

StateVector::StateVector(VectorXcd amplitudes) : amplitudes_(std::move(amplitudes)) {
  const auto n = static_cast<std::size_t>(amplitudes_.size());
  if (!is_power_of_two(n)) throw DimensionError("state length must be a power of two");
  n_qubits_ = log2_exact(n);
  if (n_qubits_ > kMaxQubits)
    throw DimensionError("state exceeds " + std::to_string(kMaxQubits) + " qubits");
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-9)
    throw ConsistencyError("state vector is not normalized");
}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
  if (n_qubits < 0 || n_qubits > kMaxQubits) throw DimensionError("qubit count out of range");
  const auto dim = std::size_t{1} << n_qubits;
  if (index >= dim) throw DimensionError("basis index out of range");
  VectorXcd v = VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

UnitaryMatrix::UnitaryMatrix(MatrixXcd entries, double tolerance) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw DimensionError("unitary must be square");
  if (!is_power_of_two(static_cast<std::size_t>(entries_.rows())))
    throw DimensionError("unitary dimension must be a power of two");
  const double r = unitarity_residual(entries_);
  if (!(r <= tolerance))
    throw ConsistencyError("matrix is not unitary (residual " + std::to_string(r) + ")");
}

UnitaryMatrix UnitaryMatrix::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return UnitaryMatrix(MatrixXcd::Identity(n, n));
}

UnitaryMatrix UnitaryMatrix::adjoint() const { return UnitaryMatrix(entries_.adjoint()); }

UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("unitary dimension mismatch");
  return UnitaryMatrix(a.matrix() * b.matrix());
}

StateVector apply(const UnitaryMatrix& u, const StateVector& s) {
  if (u.dim() != s.dim()) throw DimensionError("unitary and state dimension mismatch");
  return StateVector(u.matrix() * s.amplitudes());
}

double probability_of(const StateVector& s, std::size_t basis_index) {
  if (basis_index >= s.dim()) throw DimensionError("basis index out of range");
  return std::min(1.0, std::norm(s[basis_index]));
}

Eigen::VectorXd probabilities(const StateVector& s) { return s.amplitudes().cwiseAbs2(); }

std::vector<std::uint64_t> sample_counts(const StateVector& s, std::uint64_t shots,
                                         std::uint64_t rng_seed) {
  if (shots == 0) throw ValidationError("shots must be at least 1");
  const Eigen::VectorXd p = probabilities(s);
  std::vector<double> cdf(s.dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    acc += p(static_cast<Eigen::Index>(i));
    cdf[i] = acc;
  }
  // Draws landing past acc (rounding) go to the last state with nonzero mass.
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < cdf.size(); ++i)
    if (p(static_cast<Eigen::Index>(i)) > 0.0) last_nonzero = i;

  Rng rng(rng_seed);
  std::vector<std::uint64_t> counts(s.dim(), 0);
  for (std::uint64_t k = 0; k < shots; ++k) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t idx = it == cdf.end() ? last_nonzero : static_cast<std::size_t>(it - cdf.begin());
    ++counts[idx];
  }
  return counts;
}

std::string bitstring(std::size_t index, int n_qubits) {
  std::string out(static_cast<std::size_t>(n_qubits), '0');
  for (int b = 0; b < n_qubits; ++b)
    if ((index >> b) & 1U) out[static_cast<std::size_t>(n_qubits - 1 - b)] = '1';
  return out;
}

}  // namespace sqpf
