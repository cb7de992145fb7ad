#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sqpf/estimation.hpp"
#include "sqpf/flow_mapping.hpp"
#include "sqpf/injection_model.hpp"

namespace sqpf {

struct ExactDistribution {
  std::vector<double> values;  // distinct |loading| levels, ascending
  std::vector<double> probabilities;
  double mean = 0.0;
  double std = 0.0;
  double sigma_n = 0.0;  // std / mean, 0 when the mean is 0

  /// Pr[|loading| >= threshold], same tolerance rule as the estimator.
  double exceedance(double threshold) const;
  double metric(const Metric& m) const;
};

/// Enumerates every joint bin. Throws EnumerationBoundError beyond 2^20 states.
ExactDistribution exact_line_distribution(const VectorXd& h_row,
                                          std::span<const InjectionDistribution> distributions);

/// Two-sided critical value z_c(alpha). Conventional table values for
/// alpha = 0.10, 0.05, 0.01 (1.645, 1.96, 2.576); the normal quantile otherwise.
double critical_value(double alpha);

/// N = round(z_c(alpha)^2 sigma_n^2 / epsilon^2).
std::uint64_t required_samples(double sigma_n, double epsilon, double alpha);

/// Classical Monte Carlo with a fixed sample count; CI from the margin of error
/// z_c * s / sqrt(N) with s the sample standard deviation.
EstimationResult classical_mc_samples(const VectorXd& h_row,
                                      std::span<const InjectionDistribution> distributions,
                                      const Metric& metric, std::uint64_t samples, double alpha,
                                      std::uint64_t rng_seed);

/// Classical Monte Carlo sized by required_samples with sigma_n taken from the
/// exact line loading distribution (at least one sample).
EstimationResult classical_mc(const VectorXd& h_row,
                              std::span<const InjectionDistribution> distributions,
                              const Metric& metric, double epsilon, double alpha,
                              std::uint64_t rng_seed);

}  // namespace sqpf
