#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>
#include <numbers>

#include "sqpf/errors.hpp"
#include "sqpf/estimation.hpp"
#include "sqpf/runner.hpp"
#include "test_support.hpp"

using namespace sqpf;

namespace {

/// Single-qubit A = R_y with <1|A|0> = sin(theta).
PipelineUnitary rotation(double theta) {
  MatrixXcd a(2, 2);
  a << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return PipelineUnitary{UnitaryMatrix(a), 1, 1.0};
}

}  // namespace

TEST_CASE("Clopper-Pearson matches the beta-quantile form") {
  for (std::uint64_t n : {1ULL, 7ULL, 100ULL, 300ULL}) {
    for (std::uint64_t k = 0; k <= n; k += std::max<std::uint64_t>(1, n / 9)) {
      for (double alpha : {0.05, 0.05 / 6}) {
        const auto [lo, hi] = clopper_pearson(k, n, alpha);
        const double ref_lo = k == 0 ? 0.0
                                     : boost::math::ibeta_inv(static_cast<double>(k),
                                                              static_cast<double>(n - k + 1), alpha / 2);
        const double ref_hi = k == n ? 1.0
                                     : boost::math::ibeta_inv(static_cast<double>(k + 1),
                                                              static_cast<double>(n - k), 1 - alpha / 2);
        CHECK(lo == doctest::Approx(ref_lo).epsilon(1e-9));
        CHECK(hi == doctest::Approx(ref_hi).epsilon(1e-9));
      }
    }
  }
  CHECK_THROWS_AS(clopper_pearson(3, 2, 0.05), ValidationError);
  CHECK_THROWS_AS(clopper_pearson(0, 0, 0.05), ValidationError);
}

TEST_CASE("Grover operator on edge amplitudes") {
  const GroverOperator zero = build_grover(rotation(0.0));
  for (int k = 0; k <= 5; ++k) CHECK(zero.good_probability(k) == doctest::Approx(0.0));

  const GroverOperator one = build_grover(rotation(std::numbers::pi / 2));
  CHECK(one.good_probability(0) == doctest::Approx(1.0));

  const GroverOperator quarter = build_grover(rotation(std::numbers::pi / 6));
  CHECK(quarter.good_probability(0) == doctest::Approx(0.25));
  CHECK(quarter.good_probability(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quarter.q.residual() < 1e-10);
}

TEST_CASE("Grover rotation identity on the three-bus pipeline") {
  const PipelineConfig cfg = load_config(testing::data_path("three_bus.json"));
  const LinePipeline lp = build_line_pipeline(cfg.line_row(), cfg.injections, cfg.analysis.as_metric());
  const GroverOperator g = build_grover(*lp.pipeline);
  const double theta = std::asin(lp.pipeline->target_amplitude());
  for (int k = 0; k <= 5; ++k)
    CHECK(std::abs(g.good_probability(k) - std::pow(std::sin((2 * k + 1) * theta), 2)) < 1e-8);
}

TEST_CASE("IQAE round budget") {
  CHECK(iqae_round_budget(0.01) == 6);
  CHECK(iqae_round_budget(0.1) == 2);
}

TEST_CASE("IQAE with zero amplitude") {
  const GroverOperator g = build_grover(rotation(0.0));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EstimationResult r = iqae(g, {0.01, 0.05, 100, seed});
    CHECK(r.ci_low <= 0.0 + 1e-15);
    CHECK(r.ci_high - r.ci_low <= 0.02 + 1e-12);
  }
}

TEST_CASE("IQAE covers a known amplitude") {
  const GroverOperator g = build_grover(rotation(std::numbers::pi / 6));
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const EstimationResult r = iqae(g, {0.01, 0.05, 100, seed});
    CHECK(r.ci_high - r.ci_low <= 0.02 + 1e-12);
    CHECK(r.ci_low <= r.raw_a);
    CHECK(r.raw_a <= r.ci_high);
    CHECK(r.shots_total == 100 * static_cast<std::uint64_t>(r.rounds));
    CHECK(r.oracle_applications >= r.shots_total);
    if (r.ci_low <= 0.25 && 0.25 <= r.ci_high) ++covered;
  }
  CHECK(covered >= 190);
}

TEST_CASE("IQAE is deterministic per seed") {
  const GroverOperator g = build_grover(rotation(0.7));
  const EstimationResult a = iqae(g, {0.01, 0.05, 100, 42});
  const EstimationResult b = iqae(g, {0.01, 0.05, 100, 42});
  CHECK(a.ci_low == b.ci_low);
  CHECK(a.ci_high == b.ci_high);
  CHECK(a.shots_total == b.shots_total);
}

TEST_CASE("IQAE argument checks and round cap") {
  const GroverOperator g = build_grover(rotation(0.3));
  CHECK_THROWS_AS(iqae(g, {0.0, 0.05, 100, 1}), ValidationError);
  CHECK_THROWS_AS(iqae(g, {0.3, 0.05, 100, 1}), ValidationError);
  CHECK_THROWS_AS(iqae(g, {0.01, 1.5, 100, 1}), ValidationError);
  CHECK_THROWS_AS(iqae(g, {0.01, 0.05, 0, 1}), ValidationError);

  IqaeOptions starved{0.001, 0.05, 1, 3};
  starved.max_rounds_factor = 1;
  try {
    iqae(g, starved);
    FAIL("expected EstimationFailure");
  } catch (const EstimationFailure& e) {
    CHECK(e.a_low() <= e.a_high());
  }
}

TEST_CASE("rescale maps amplitude estimates to physical values") {
  const double scaling = 46.27478 / std::sqrt(0.1885);
  EstimationResult r;
  r.raw_a = 0.1885;
  r.ci_low = 0.18;
  r.ci_high = 0.19;
  const EstimationResult s = rescale(r, scaling);
  CHECK(s.metric_value == doctest::Approx(46.275).epsilon(1e-4));
  CHECK(s.ci_low <= s.metric_value);
  CHECK(s.metric_value <= s.ci_high);

  r.raw_a = r.ci_low = r.ci_high = 0.0571;
  CHECK(rescale(r, scaling).metric_value == doctest::Approx(25.47).epsilon(2e-3));

  r.raw_a = r.ci_low = r.ci_high = 0.0;
  CHECK(rescale(r, scaling).metric_value == 0.0);
}

TEST_CASE("method names") {
  CHECK(method_from_string(to_string(Method::iqae)) == Method::iqae);
  CHECK(method_from_string("cmc") == Method::cmc);
  CHECK_THROWS_AS(method_from_string("mlae"), ValidationError);
}
