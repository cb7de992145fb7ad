#include "sqpf/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "sqpf/errors.hpp"
#include "sqpf/rng.hpp"

namespace sqpf {

namespace {

MatrixXcd phase_flip(std::size_t dim, std::size_t index) {
  const auto n = static_cast<Eigen::Index>(dim);
  MatrixXcd s = MatrixXcd::Identity(n, n);
  s(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = -1.0;
  return s;
}

double theta_of(double amplitude) { return std::asin(std::clamp(std::abs(amplitude), 0.0, 1.0)); }

// log of the binomial pmf, via lgamma.
double log_pmf(std::uint64_t k, std::uint64_t n, double p) {
  const double kd = static_cast<double>(k), nd = static_cast<double>(n);
  double out = std::lgamma(nd + 1) - std::lgamma(kd + 1) - std::lgamma(nd - kd + 1);
  if (k > 0) out += kd * std::log(p);
  if (k < n) out += (nd - kd) * std::log1p(-p);
  return out;
}

// P[X >= k] for X ~ Bin(n, p).
double upper_tail(std::uint64_t k, std::uint64_t n, double p) {
  double s = 0.0;
  for (std::uint64_t j = k; j <= n; ++j) s += std::exp(log_pmf(j, n, p));
  return std::min(s, 1.0);
}

// P[X <= k] for X ~ Bin(n, p).
double lower_tail(std::uint64_t k, std::uint64_t n, double p) {
  double s = 0.0;
  for (std::uint64_t j = 0; j <= k; ++j) s += std::exp(log_pmf(j, n, p));
  return std::min(s, 1.0);
}

// Root of a monotone function on [0, 1] by bisection.
template <typename F>
double bisect(F&& f, bool increasing, double target) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool above = f(mid) > target;
    if (above == increasing)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

struct NextPower {
  int k;
  bool upper_half;
};

// Largest K = 4k+2 (at least twice the current one) such that the scaled
// interval K*[theta_l, theta_u] stays inside one half-plane. Angles here are in
// units of full turns (theta / 2pi).
NextPower find_next_power(int k, bool upper_half, double theta_l, double theta_u) {
  const int old_scaling = 4 * k + 2;
  const auto max_scaling = static_cast<long>(1.0 / (2.0 * (theta_u - theta_l)));
  long scaling = max_scaling - ((max_scaling - 2) % 4 + 4) % 4;
  while (scaling >= 2L * old_scaling) {
    const double s = static_cast<double>(scaling);
    const double lo = s * theta_l - std::floor(s * theta_l);
    const double hi = s * theta_u - std::floor(s * theta_u);
    if (lo <= hi && hi <= 0.5 && lo <= 0.5) return {static_cast<int>((scaling - 2) / 4), true};
    if (hi >= 0.5 && hi >= lo && lo >= 0.5) return {static_cast<int>((scaling - 2) / 4), false};
    scaling -= 4;
  }
  return {k, upper_half};
}

}  // namespace

StateVector GroverOperator::amplified_state(int k) const {
  VectorXcd s = a_op.a.matrix().col(0);
  for (int i = 0; i < k; ++i) s = q.matrix() * s;
  s /= s.norm();
  return StateVector(std::move(s));
}

double GroverOperator::good_probability(int k) const {
  return probability_of(amplified_state(k), good_state_index);
}

GroverOperator build_grover(const PipelineUnitary& a) {
  const std::size_t dim = a.a.dim();
  const MatrixXcd& am = a.a.matrix();
  const MatrixXcd q = am * phase_flip(dim, 0) * am.adjoint() * phase_flip(dim, a.good_state_index);
  if (unitarity_residual(q) > 1e-8) throw ConsistencyError("Grover operator is not unitary");

  GroverOperator g{UnitaryMatrix(q, 1e-8), a, a.good_state_index};
  const double theta = theta_of(a.target_amplitude());
  for (int k = 0; k <= 2; ++k) {
    const double expected = std::pow(std::sin((2 * k + 1) * theta), 2);
    if (std::abs(g.good_probability(k) - expected) > 1e-8)
      throw ConsistencyError("Grover rotation identity fails at k=" + std::to_string(k));
  }
  return g;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::iqae: return "iqae";
    case Method::cmc: return "cmc";
    case Method::exact: return "exact";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "iqae") return Method::iqae;
  if (s == "cmc") return Method::cmc;
  if (s == "exact") return Method::exact;
  throw ValidationError("unknown method '" + s + "'", "analysis.methods");
}

std::pair<double, double> clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                                          double alpha) {
  if (trials == 0) throw ValidationError("Clopper-Pearson needs at least one trial");
  if (successes > trials) throw ValidationError("successes exceed trials");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0,1)");
  double lower = 0.0, upper = 1.0;
  // Lower bound: P[X >= k; p] = alpha/2, increasing in p.
  if (successes > 0)
    lower = bisect([&](double p) { return upper_tail(successes, trials, p); }, true, alpha / 2);
  // Upper bound: P[X <= k; p] = alpha/2, decreasing in p.
  if (successes < trials)
    upper = bisect([&](double p) { return lower_tail(successes, trials, p); }, false, alpha / 2);
  return {lower, upper};
}

int iqae_round_budget(double epsilon) {
  return static_cast<int>(std::ceil(std::log2(std::numbers::pi / (8.0 * epsilon))));
}

EstimationResult iqae(const GroverOperator& g, const IqaeOptions& options) {
  if (!(options.epsilon > 0.0 && options.epsilon < 0.25))
    throw ValidationError("epsilon must lie in (0, 0.25)", "analysis.epsilon");
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw ValidationError("alpha must lie in (0, 1)", "analysis.alpha");
  if (options.shots_per_round < 1)
    throw ValidationError("shots_per_round must be at least 1", "analysis.shots_per_round");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int budget = std::max(1, iqae_round_budget(options.epsilon));
  const double alpha_round = options.alpha / budget;
  const int max_rounds = options.max_rounds_factor * budget;

  Rng rng(options.seed);
  std::unordered_map<int, double> prob_cache;
  auto prob_at = [&](int k) {
    auto it = prob_cache.find(k);
    if (it == prob_cache.end()) it = prob_cache.emplace(k, g.good_probability(k)).first;
    return it->second;
  };

  EstimationResult res;
  res.method = Method::iqae;
  res.epsilon = options.epsilon;
  res.alpha = options.alpha;
  res.seed = options.seed;

  double theta_l = 0.0, theta_u = 0.25;  // theta / 2pi, theta in [0, pi/2]
  int k = 0;
  bool upper_half = true;
  int prev_k = -1;
  std::uint64_t pooled_shots = 0, pooled_hits = 0;

  while (theta_u - theta_l > options.epsilon / std::numbers::pi) {
    if (res.rounds >= max_rounds) {
      throw EstimationFailure("IQAE did not converge within " + std::to_string(max_rounds) +
                                  " rounds",
                              std::pow(std::sin(two_pi * theta_l), 2),
                              std::pow(std::sin(two_pi * theta_u), 2));
    }
    ++res.rounds;
    const NextPower next = find_next_power(k, upper_half, theta_l, theta_u);
    k = next.k;
    upper_half = next.upper_half;

    const std::uint64_t hits = rng.binomial(options.shots_per_round, prob_at(k));
    res.shots_total += options.shots_per_round;
    res.oracle_applications += options.shots_per_round * static_cast<std::uint64_t>(2 * k + 1);

    // Rounds that repeat the same power pool their shots.
    if (k != prev_k) pooled_shots = pooled_hits = 0;
    pooled_shots += options.shots_per_round;
    pooled_hits += hits;
    prev_k = k;

    const auto [a_min, a_max] = clopper_pearson(pooled_hits, pooled_shots, alpha_round);
    double t_min, t_max;
    if (upper_half) {
      t_min = std::acos(std::clamp(1.0 - 2.0 * a_min, -1.0, 1.0)) / two_pi;
      t_max = std::acos(std::clamp(1.0 - 2.0 * a_max, -1.0, 1.0)) / two_pi;
    } else {
      t_min = 1.0 - std::acos(std::clamp(1.0 - 2.0 * a_max, -1.0, 1.0)) / two_pi;
      t_max = 1.0 - std::acos(std::clamp(1.0 - 2.0 * a_min, -1.0, 1.0)) / two_pi;
    }
    const double scaling = 4.0 * k + 2.0;
    const double new_u = (std::floor(scaling * theta_u) + t_max) / scaling;
    const double new_l = (std::floor(scaling * theta_l) + t_min) / scaling;
    theta_l = new_l;
    theta_u = new_u;
  }

  double a_l = std::pow(std::sin(two_pi * theta_l), 2);
  double a_u = std::pow(std::sin(two_pi * theta_u), 2);
  if (a_l > a_u) std::swap(a_l, a_u);
  res.ci_low = a_l;
  res.ci_high = a_u;
  res.raw_a = 0.5 * (a_l + a_u);
  res.metric_value = res.raw_a;
  return res;
}

EstimationResult rescale(const EstimationResult& amplitude_result, double scaling) {
  auto to_metric = [scaling](double a) { return std::sqrt(std::clamp(a, 0.0, 1.0)) * scaling; };
  EstimationResult out = amplitude_result;
  out.metric_value = to_metric(amplitude_result.raw_a);
  out.ci_low = to_metric(amplitude_result.ci_low);
  out.ci_high = to_metric(amplitude_result.ci_high);
  return out;
}

}  // namespace sqpf
