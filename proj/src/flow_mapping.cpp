#include "sqpf/flow_mapping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sqpf {

LineFlowMap build_line_map(const VectorXd& h_row,
                           std::span<const InjectionDistribution> distributions, LineId line) {
  if (distributions.empty()) throw ValidationError("build_line_map needs at least one distribution");
  if (static_cast<std::size_t>(h_row.size()) != distributions.size())
    throw DimensionError("PTDF row length " + std::to_string(h_row.size()) + " does not match " +
                         std::to_string(distributions.size()) + " distributions");

  int qubits = 0;
  for (const auto& d : distributions) {
    validate(d);
    qubits += d.qubits();
  }
  if (qubits > kMaxQubits) throw DimensionError("line map exceeds the qubit limit");

  VectorXd ll = VectorXd::Zero(1);
  for (std::size_t i = 0; i < distributions.size(); ++i) {
    const auto& r = distributions[i].values_mw;
    const Eigen::Map<const VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    ll = kron_sum(ll, (h_row(static_cast<Eigen::Index>(i)) * rv).eval());
  }
  ll = ll.cwiseAbs();

  const auto n_cols = ll.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_cols));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return ll(x) < ll(y); });

  LineFlowMap out;
  out.line = line;
  std::vector<int> level_of(static_cast<std::size_t>(n_cols), 0);
  double anchor = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double value = ll(order[k]);
    if (k == 0 || value - anchor > kLoadingTolerance) {
      anchor = value;
      out.distinct_values.push_back(value);
    }
    level_of[static_cast<std::size_t>(order[k])] = static_cast<int>(out.distinct_values.size()) - 1;
  }

  const auto levels = static_cast<Eigen::Index>(out.distinct_values.size());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n_cols));
  VectorXd counts = VectorXd::Zero(levels);
  for (Eigen::Index c = 0; c < n_cols; ++c) {
    const int k = level_of[static_cast<std::size_t>(c)];
    entries.emplace_back(k, c, 1.0);
    counts(k) += 1.0;
  }
  out.m.resize(levels, n_cols);
  out.m.setFromTriplets(entries.begin(), entries.end());
  out.row_norms = counts.cwiseSqrt();
  return out;
}

LineFlowMap orthonormalize_rows(LineFlowMap map) {
  SparseRowMatrix sc = map.m;
  for (Eigen::Index k = 0; k < sc.outerSize(); ++k) {
    const double norm = map.row_norms(k);
    if (!(norm > 0.0)) throw ConsistencyError("line map has an empty row");
    for (SparseRowMatrix::InnerIterator it(sc, k); it; ++it) it.valueRef() /= norm;
  }
  map.m_sc = std::move(sc);
  return map;
}

UnitaryFactorization unitary_factorize(const MatrixXd& m_sc) {
  const auto r = m_sc.rows();
  const auto n = m_sc.cols();
  if (r == 0 || r > n) throw DimensionError("semi-orthogonal map must have 1..N rows");
  if (!is_power_of_two(static_cast<std::size_t>(n)))
    throw DimensionError("map width must be a power of two");

  Eigen::JacobiSVD<MatrixXd> svd(m_sc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& sigma = svd.singularValues();
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (std::abs(sigma(i) - 1.0) > 1e-6)
      throw ConsistencyError("singular value " + std::to_string(sigma(i)) +
                             " deviates from 1; map rows are not orthonormal");

  MatrixXd u_pad = MatrixXd::Identity(n, n);
  u_pad.topLeftCorner(r, r) = svd.matrixU();
  const MatrixXd v_h = svd.matrixV().transpose();
  return UnitaryFactorization{UnitaryMatrix(v_h.cast<Complex>()),
                              UnitaryMatrix(u_pad.cast<Complex>())};
}

EstimatorVector build_estimator_vector(const LineFlowMap& map, const Metric& metric,
                                       int n_qubits,
                                       std::span<const EncodedInjection> encodings) {
  if (!map.m_sc) throw ValidationError("line map must be orthonormalized first");
  if (metric.kind == Metric::Kind::overload && !(metric.threshold >= 0.0))
    throw ValidationError("overload threshold must be non-negative");
  const auto dim = Eigen::Index{1} << n_qubits;
  if (dim < static_cast<Eigen::Index>(map.levels()))
    throw DimensionError("register too small for the line map");

  EstimatorVector out;
  out.metric = metric;
  out.v = VectorXd::Zero(dim);
  for (std::size_t k = 0; k < map.levels(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    out.v(i) = metric.weight(map.distinct_values[k]) * map.row_norms(i);
  }
  out.scaling = out.v.norm() * norm_product(encodings);
  return out;
}

UnitaryMatrix householder_unitary(const VectorXd& v) {
  return UnitaryMatrix(householder_matrix(v).cast<Complex>());
}

PipelineUnitary assemble_pipeline(std::span<const UnitaryMatrix> prep,
                                  const UnitaryFactorization& fact, const UnitaryMatrix& h,
                                  double scaling) {
  if (prep.empty()) throw DimensionError("pipeline needs at least one preparation unitary");
  MatrixXcd p = prep.front().matrix();
  for (std::size_t i = 1; i < prep.size(); ++i) p = kron(p, prep[i].matrix());
  const auto dim = static_cast<std::size_t>(p.rows());
  if (fact.v_h.dim() != dim || fact.u_padded.dim() != dim || h.dim() != dim)
    throw DimensionError("pipeline factor dimensions differ");
  if (log2_exact(dim) > kMaxPipelineQubits)
    throw DimensionError("pipeline exceeds " + std::to_string(kMaxPipelineQubits) + " qubits");

  MatrixXcd a = h.matrix() * (fact.u_padded.matrix() * (fact.v_h.matrix() * p));
  return PipelineUnitary{UnitaryMatrix(std::move(a)), dim - 1, scaling};
}

StateVector LinePipeline::input_state() const { return joint_state(encodings); }

StateVector LinePipeline::loading_state() const {
  const StateVector psi = input_state();
  return apply(factorization.u_padded, apply(factorization.v_h, psi));
}

LinePipeline build_line_pipeline(const VectorXd& h_row,
                                 std::span<const InjectionDistribution> distributions,
                                 const Metric& metric, LineId line) {
  std::vector<EncodedInjection> encodings;
  encodings.reserve(distributions.size());
  for (const auto& d : distributions) encodings.push_back(encode(d));

  LineFlowMap map = orthonormalize_rows(build_line_map(h_row, distributions, line));
  const int n = log2_exact(static_cast<std::size_t>(map.m.cols()));
  if (n > kMaxPipelineQubits)
    throw DimensionError("pipeline exceeds " + std::to_string(kMaxPipelineQubits) + " qubits");
  UnitaryFactorization fact = unitary_factorize(MatrixXd(*map.m_sc));
  EstimatorVector est = build_estimator_vector(map, metric, n, encodings);

  std::optional<PipelineUnitary> pipeline;
  if (!est.degenerate()) {
    std::vector<UnitaryMatrix> prep;
    for (const auto& e : encodings) prep.push_back(state_prep_unitary(e));
    pipeline = assemble_pipeline(prep, fact, householder_unitary(est.v), est.scaling);
  }
  return LinePipeline{std::move(encodings), std::move(map), std::move(fact), std::move(est),
                      std::move(pipeline)};
}

}  // namespace sqpf
