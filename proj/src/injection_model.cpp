#include "sqpf/injection_model.hpp"

#include <cmath>
#include <string>

#include "sqpf/errors.hpp"

namespace sqpf {

void validate(const InjectionDistribution& dist) {
  const std::string field = "injection[bus " + std::to_string(dist.bus) + "]";
  if (dist.values_mw.size() != dist.probabilities.size())
    throw ValidationError("values_mw and probabilities differ in length", field);
  if (!is_power_of_two(dist.values_mw.size()) || dist.values_mw.size() < 2)
    throw ValidationError("number of bins must be a power of two (>= 2)", field);
  for (std::size_t i = 0; i < dist.values_mw.size(); ++i) {
    if (!std::isfinite(dist.values_mw[i]))
      throw ValidationError("non-finite value", field + ".values_mw");
    if (i > 0 && !(dist.values_mw[i] > dist.values_mw[i - 1]))
      throw ValidationError("values_mw must be strictly increasing", field + ".values_mw");
  }
  double sum = 0.0;
  for (double p : dist.probabilities) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError("probability outside [0,1]", field + ".probabilities");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("probabilities sum to " + std::to_string(sum) + ", expected 1",
                          field + ".probabilities");
}

EncodedInjection encode(const InjectionDistribution& dist) {
  const Eigen::Map<const VectorXd> p(dist.probabilities.data(),
                                     static_cast<Eigen::Index>(dist.probabilities.size()));
  const double norm = p.norm();
  if (!(norm > 0.0))
    throw ValidationError("all-zero probability vector",
                          "injection[bus " + std::to_string(dist.bus) + "]");
  validate(dist);
  return EncodedInjection{p / norm, norm};
}

StateVector joint_state(std::span<const EncodedInjection> encodings) {
  if (encodings.empty()) throw DimensionError("joint_state needs at least one encoding");
  VectorXd psi = encodings.front().amplitudes;
  for (std::size_t i = 1; i < encodings.size(); ++i) psi = kron(psi, encodings[i].amplitudes);
  return StateVector(psi.cast<Complex>());
}

UnitaryMatrix state_prep_unitary(const EncodedInjection& encoding) {
  const VectorXd& b = encoding.amplitudes;
  const auto n = b.size();
  VectorXd w = b;
  w(0) -= 1.0;
  const double wn2 = w.squaredNorm();
  if (wn2 < 1e-24) return UnitaryMatrix::identity(static_cast<std::size_t>(n));
  const MatrixXd h = MatrixXd::Identity(n, n) - 2.0 * w * w.transpose() / wn2;
  return UnitaryMatrix(h.cast<Complex>());
}

UnitaryMatrix joint_prep_unitary(std::span<const EncodedInjection> encodings) {
  if (encodings.empty()) throw DimensionError("joint_prep_unitary needs at least one encoding");
  MatrixXcd p = state_prep_unitary(encodings.front()).matrix();
  for (std::size_t i = 1; i < encodings.size(); ++i)
    p = kron(p, state_prep_unitary(encodings[i]).matrix());
  return UnitaryMatrix(std::move(p));
}

double norm_product(std::span<const EncodedInjection> encodings) {
  double prod = 1.0;
  for (const auto& e : encodings) prod *= e.norm_factor;
  return prod;
}

}  // namespace sqpf
