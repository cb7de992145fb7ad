#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "sqpf/flow_mapping.hpp"
#include "sqpf/quantum_sim.hpp"

namespace sqpf {

/// Q = A S_0 A^H S_g. S_g flips the phase of the good state, S_0 that of |0>.
struct GroverOperator {
  UnitaryMatrix q;
  PipelineUnitary a_op;
  std::size_t good_state_index = 0;

  /// Q^k A |0>.
  StateVector amplified_state(int k) const;
  /// Probability of measuring the good state in Q^k A |0>.
  double good_probability(int k) const;
};

/// Builds Q and checks the rotation identity P_good(k) = sin^2((2k+1) theta)
/// for k = 0, 1, 2. Throws ConsistencyError when it fails.
GroverOperator build_grover(const PipelineUnitary& a);

enum class Method { iqae, cmc, exact };

std::string to_string(Method m);
Method method_from_string(const std::string& s);  // throws ValidationError

struct EstimationResult {
  Method method = Method::exact;
  double raw_a = 0.0;  // amplitude-squared for IQAE, metric value otherwise
  double metric_value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t shots_total = 0;
  std::uint64_t oracle_applications = 0;  // shots weighted by 2k+1
  int rounds = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
};

/// Two-sided Clopper-Pearson interval at level 1 - alpha for `successes` out of
/// `trials`. Bounds are found by bisection on the exact binomial tails.
std::pair<double, double> clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                                          double alpha);

struct IqaeOptions {
  double epsilon = 0.01;  // target half-width on the amplitude scale
  double alpha = 0.05;
  std::uint64_t shots_per_round = 100;
  std::uint64_t seed = 0;
  int max_rounds_factor = 10;  // cap = factor * T
};

/// Number of confidence splits, ceil(log2(pi / (8 epsilon))).
int iqae_round_budget(double epsilon);

/// Iterative amplitude estimation on simulated shots. The returned interval is
/// on the amplitude-squared scale; metric_value is its midpoint.
/// Throws EstimationFailure when the round cap is reached.
EstimationResult iqae(const GroverOperator& g, const IqaeOptions& options);

/// sqrt(a) * scaling applied to the estimate and both interval ends.
EstimationResult rescale(const EstimationResult& amplitude_result, double scaling);

}  // namespace sqpf
