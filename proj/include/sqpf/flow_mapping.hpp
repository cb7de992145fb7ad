#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "sqpf/errors.hpp"
#include "sqpf/grid_model.hpp"
#include "sqpf/injection_model.hpp"
#include "sqpf/linalg.hpp"
#include "sqpf/quantum_sim.hpp"

namespace sqpf {

/// Loadings closer than this (fraction of rating) are one level.
inline constexpr double kLoadingTolerance = 1e-9;

/// Largest register the dense pipeline builds unitaries for.
inline constexpr int kMaxPipelineQubits = 10;

/// Pairwise sums ordered like kron(a, b): out[i*|b| + j] = a[i] + b[j].
template <typename DerivedA, typename DerivedB>
Vector<typename DerivedA::Scalar> kron_sum(const Eigen::MatrixBase<DerivedA>& a,
                                           const Eigen::MatrixBase<DerivedB>& b) {
  using S = typename DerivedA::Scalar;
  Vector<S> out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = b.array() + a(i);
  return out;
}

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LineFlowMap {
  LineId line = 0;
  std::vector<double> distinct_values;  // sorted |loading| levels
  SparseRowMatrix m;                    // levels x joint states, one 1 per column
  VectorXd row_norms;
  std::optional<SparseRowMatrix> m_sc;  // set by orthonormalize_rows

  std::size_t levels() const noexcept { return distinct_values.size(); }
};

/// Groups every joint input state by the absolute line loading it produces.
LineFlowMap build_line_map(const VectorXd& h_row,
                           std::span<const InjectionDistribution> distributions,
                           LineId line = 0);

/// Scales each row to unit norm so that M_sc * M_sc^T = I.
LineFlowMap orthonormalize_rows(LineFlowMap map);

struct UnitaryFactorization {
  UnitaryMatrix v_h;
  UnitaryMatrix u_padded;
};

/// SVD of a matrix with orthonormal rows, M_sc = U V^H with S = I.
/// U is padded with an identity block to the full register dimension.
UnitaryFactorization unitary_factorize(const MatrixXd& m_sc);

struct Metric {
  enum class Kind { mean, overload };
  Kind kind = Kind::mean;
  double threshold = 0.0;  // fraction of rating, overload only

  static Metric mean() { return {Kind::mean, 0.0}; }
  static Metric overload(double threshold) { return {Kind::overload, threshold}; }

  /// Weight of a loading level: the level itself, or the overload indicator.
  double weight(double loading) const {
    if (kind == Kind::mean) return loading;
    return loading >= threshold - kLoadingTolerance ? 1.0 : 0.0;
  }
};

struct EstimatorVector {
  Metric metric;
  VectorXd v;
  double scaling = 0.0;

  /// All weights zero: the metric is exactly 0 and no estimation is needed.
  bool degenerate() const { return !(v.squaredNorm() > 0.0); }
};

EstimatorVector build_estimator_vector(const LineFlowMap& map, const Metric& metric,
                                       int n_qubits,
                                       std::span<const EncodedInjection> encodings);

/// Householder reflection with v / ||v|| in its last row and column,
/// H = I - 2 w w^T / (w^T w), w = v/||v|| - e_last. Identity when w vanishes.
template <typename Scalar>
Matrix<Scalar> householder_matrix(const Vector<Scalar>& v) {
  const auto n = v.size();
  const auto vn = v.norm();
  if (!(vn > 0)) throw ValidationError("householder vector must be non-zero");
  Vector<Scalar> w = v / vn;
  w(n - 1) -= Scalar(1);
  const auto wn2 = w.squaredNorm();
  if (std::sqrt(wn2) < 1e-12) return Matrix<Scalar>::Identity(n, n);
  return Matrix<Scalar>::Identity(n, n) - (Scalar(2) / wn2) * w * w.transpose();
}

UnitaryMatrix householder_unitary(const VectorXd& v);

struct PipelineUnitary {
  UnitaryMatrix a;
  std::size_t good_state_index = 0;
  double scaling = 0.0;

  int n_qubits() const { return log2_exact(a.dim()); }
  /// <1...1| A |0>.
  double target_amplitude() const { return a.matrix()(static_cast<Eigen::Index>(good_state_index), 0).real(); }
};

/// A = H * U_pad * V^H * (prep_1 (x) prep_2 (x) ...).
PipelineUnitary assemble_pipeline(std::span<const UnitaryMatrix> prep,
                                  const UnitaryFactorization& fact, const UnitaryMatrix& h,
                                  double scaling);

/// Everything built for one line and one metric.
struct LinePipeline {
  std::vector<EncodedInjection> encodings;
  LineFlowMap map;
  UnitaryFactorization factorization;
  EstimatorVector estimator;
  std::optional<PipelineUnitary> pipeline;  // empty when the estimator is degenerate

  int n_qubits() const { return log2_exact(static_cast<std::size_t>(map.m.cols())); }
  /// Input state P|0>.
  StateVector input_state() const;
  /// Line distribution state U_pad V^H P|0>.
  StateVector loading_state() const;
};

LinePipeline build_line_pipeline(const VectorXd& h_row,
                                 std::span<const InjectionDistribution> distributions,
                                 const Metric& metric, LineId line = 0);

}  // namespace sqpf
