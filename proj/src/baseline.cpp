#include "sqpf/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sqpf/errors.hpp"
#include "sqpf/rng.hpp"

namespace sqpf {

double ExactDistribution::exceedance(double threshold) const {
  double p = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= threshold - kLoadingTolerance) p += probabilities[i];
  return p;
}

double ExactDistribution::metric(const Metric& m) const {
  return m.kind == Metric::Kind::mean ? mean : exceedance(m.threshold);
}

ExactDistribution exact_line_distribution(const VectorXd& h_row,
                                          std::span<const InjectionDistribution> distributions) {
  if (distributions.empty()) throw ValidationError("no distributions to enumerate");
  if (static_cast<std::size_t>(h_row.size()) != distributions.size())
    throw DimensionError("PTDF row does not match the distributions");
  int qubits = 0;
  for (const auto& d : distributions) {
    validate(d);
    qubits += d.qubits();
  }
  if (qubits > 20) throw EnumerationBoundError("enumeration limited to 20 qubits");

  // Mixed-radix odometer over the bins of every bus, last bus fastest.
  const std::size_t n_bus = distributions.size();
  std::vector<std::size_t> digit(n_bus, 0);
  std::map<double, double> mass;
  bool done = false;
  while (!done) {
    double flow = 0.0, prob = 1.0;
    for (std::size_t i = 0; i < n_bus; ++i) {
      flow += h_row(static_cast<Eigen::Index>(i)) * distributions[i].values_mw[digit[i]];
      prob *= distributions[i].probabilities[digit[i]];
    }
    mass[std::abs(flow)] += prob;

    done = true;
    for (std::size_t pos = n_bus; pos-- > 0;) {
      if (++digit[pos] < distributions[pos].bins()) {
        done = false;
        break;
      }
      digit[pos] = 0;
    }
  }

  // Levels within tolerance of a group's smallest member are one level.
  ExactDistribution out;
  double anchor = 0.0;
  for (const auto& [value, p] : mass) {
    if (out.values.empty() || value - anchor > kLoadingTolerance) {
      anchor = value;
      out.values.push_back(value);
      out.probabilities.push_back(0.0);
    }
    out.probabilities.back() += p;
  }
  // Grouping above sees every joint state so levels line up with the flow map;
  // the reported support keeps only reachable levels.
  for (std::size_t k = out.values.size(); k-- > 0;) {
    if (out.probabilities[k] == 0.0) {
      out.values.erase(out.values.begin() + static_cast<std::ptrdiff_t>(k));
      out.probabilities.erase(out.probabilities.begin() + static_cast<std::ptrdiff_t>(k));
    }
  }

  double m1 = 0.0, m2 = 0.0;
  for (const auto& [value, p] : mass) {
    m1 += value * p;
    m2 += value * value * p;
  }
  out.mean = m1;
  out.std = std::sqrt(std::max(0.0, m2 - m1 * m1));
  out.sigma_n = m1 > 0.0 ? out.std / m1 : 0.0;
  return out;
}

double critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0,1)");
  struct Entry {
    double alpha, z;
  };
  constexpr Entry table[] = {{0.10, 1.645}, {0.05, 1.96}, {0.01, 2.576}};
  for (const auto& e : table)
    if (std::abs(alpha - e.alpha) < 1e-12) return e.z;
  // Solve erfc(z / sqrt2) = alpha for z >= 0.
  double lo = 0.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t required_samples(double sigma_n, double epsilon, double alpha) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(sigma_n >= 0.0)) throw ValidationError("sigma_n must be non-negative");
  const double z = critical_value(alpha);
  return static_cast<std::uint64_t>(std::llround(z * z * sigma_n * sigma_n / (epsilon * epsilon)));
}

EstimationResult classical_mc_samples(const VectorXd& h_row,
                                      std::span<const InjectionDistribution> distributions,
                                      const Metric& metric, std::uint64_t samples, double alpha,
                                      std::uint64_t rng_seed) {
  if (samples == 0) throw ValidationError("Monte Carlo needs at least one sample");
  if (static_cast<std::size_t>(h_row.size()) != distributions.size())
    throw DimensionError("PTDF row does not match the distributions");

  std::vector<std::vector<double>> cdfs;
  for (const auto& d : distributions) {
    validate(d);
    std::vector<double> c(d.bins());
    double acc = 0.0;
    for (std::size_t j = 0; j < d.bins(); ++j) c[j] = acc += d.probabilities[j];
    cdfs.push_back(std::move(c));
  }

  Rng rng(rng_seed);
  // Welford running mean / variance.
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    double flow = 0.0;
    for (std::size_t i = 0; i < distributions.size(); ++i) {
      const auto& c = cdfs[i];
      const double u = rng.uniform() * c.back();
      auto it = std::upper_bound(c.begin(), c.end(), u);
      if (it == c.end()) --it;
      flow += h_row(static_cast<Eigen::Index>(i)) *
              distributions[i].values_mw[static_cast<std::size_t>(it - c.begin())];
    }
    const double x = metric.weight(std::abs(flow));
    const double delta = x - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (x - mean);
  }
  const double sd = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1)) : 0.0;
  const double me = critical_value(alpha) * sd / std::sqrt(static_cast<double>(samples));

  EstimationResult res;
  res.method = Method::cmc;
  res.raw_a = mean;
  res.metric_value = mean;
  res.ci_low = mean - me;
  res.ci_high = mean + me;
  res.shots_total = samples;
  res.oracle_applications = samples;
  res.alpha = alpha;
  res.seed = rng_seed;
  return res;
}

EstimationResult classical_mc(const VectorXd& h_row,
                              std::span<const InjectionDistribution> distributions,
                              const Metric& metric, double epsilon, double alpha,
                              std::uint64_t rng_seed) {
  const ExactDistribution exact = exact_line_distribution(h_row, distributions);
  const std::uint64_t n = std::max<std::uint64_t>(1, required_samples(exact.sigma_n, epsilon, alpha));
  EstimationResult res = classical_mc_samples(h_row, distributions, metric, n, alpha, rng_seed);
  res.epsilon = epsilon;
  return res;
}

}  // namespace sqpf
