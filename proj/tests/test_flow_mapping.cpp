#include <doctest.h>

#include <random>

#include "sqpf/errors.hpp"
#include "sqpf/flow_mapping.hpp"
#include "test_support.hpp"

using namespace sqpf;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

InjectionDistribution binary(BusId bus, std::vector<double> p = {0.5, 0.5}) {
  return {bus, {0.0, 1.0}, std::move(p)};
}

}  // namespace

TEST_CASE("kron_sum enumerates pairwise sums, first operand most significant") {
  CHECK(kron_sum(vec({0}), vec({0, 2})) == vec({0, 2}));
  CHECK(kron_sum(vec({0, 1}), vec({0, 2})) == vec({0, 2, 1, 3}));
  CHECK(kron_sum(vec({0, 0.5}), vec({0, -0.5})) == vec({0, -0.5, 0.5, 0}));
}

TEST_CASE("line map for a single bus is the identity") {
  const std::vector<InjectionDistribution> d{testing::forecast(1)};
  const LineFlowMap m = build_line_map(vec({1.0}), d);
  CHECK(m.distinct_values == std::vector<double>{0, 1, 2, 3});
  CHECK((MatrixXd(m.m) - MatrixXd::Identity(4, 4)).norm() == 0.0);
  CHECK(m.row_norms == vec({1, 1, 1, 1}));
}

TEST_CASE("line map groups equal loadings") {
  const std::vector<InjectionDistribution> d{binary(1), binary(2)};
  const LineFlowMap m = build_line_map(vec({1.0, 1.0}), d);
  CHECK(m.distinct_values == std::vector<double>{0, 1, 2});
  MatrixXd expected(3, 4);
  expected << 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1;
  CHECK(MatrixXd(m.m) == expected);
  CHECK(m.row_norms(1) == doctest::Approx(std::sqrt(2.0)));

  const LineFlowMap c = build_line_map(vec({0.5, -0.5}), d);
  CHECK(c.distinct_values == std::vector<double>{0, 0.5});
  CHECK(c.row_norms(0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(c.row_norms(1) == doctest::Approx(std::sqrt(2.0)));
  MatrixXd ce(2, 4);
  ce << 1, 0, 0, 1, 0, 1, 1, 0;
  CHECK(MatrixXd(c.m) == ce);
}

TEST_CASE("line map structural invariants") {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 40; ++t) {
    const auto inst = testing::random_instance(gen);
    const LineFlowMap m = build_line_map(inst.h_row, inst.distributions);
    const MatrixXd dense(m.m);
    for (Eigen::Index c = 0; c < dense.cols(); ++c) CHECK(dense.col(c).sum() == 1.0);
    for (Eigen::Index k = 0; k < dense.rows(); ++k) {
      CHECK(dense.row(k).sum() > 0.0);
      CHECK(m.row_norms(k) == doctest::Approx(std::sqrt(dense.row(k).sum())));
    }
    CHECK(std::is_sorted(m.distinct_values.begin(), m.distinct_values.end()));
  }
}

TEST_CASE("line map rejects bad input") {
  const std::vector<InjectionDistribution> none;
  CHECK_THROWS_AS(build_line_map(VectorXd(0), none), ValidationError);
  const std::vector<InjectionDistribution> one{binary(1)};
  CHECK_THROWS_AS(build_line_map(vec({1.0, 2.0}), one), DimensionError);
}

TEST_CASE("orthonormalize rows") {
  const std::vector<InjectionDistribution> d1{testing::forecast(1)};
  const LineFlowMap id = orthonormalize_rows(build_line_map(vec({1.0}), d1));
  CHECK((MatrixXd(*id.m_sc) - MatrixXd::Identity(4, 4)).norm() == 0.0);

  const std::vector<InjectionDistribution> d{binary(1), binary(2)};
  const LineFlowMap m = orthonormalize_rows(build_line_map(vec({1.0, 1.0}), d));
  const MatrixXd sc(*m.m_sc);
  CHECK(sc(1, 1) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(sc(1, 2) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK((sc * sc.transpose() - MatrixXd::Identity(3, 3)).norm() < 1e-12);
  CHECK(m.row_norms(1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("unitary factorization reproduces the map") {
  const UnitaryFactorization id = unitary_factorize(MatrixXd::Identity(4, 4));
  CHECK((id.u_padded.matrix() * id.v_h.matrix() - MatrixXcd::Identity(4, 4)).norm() < 1e-12);

  MatrixXd perm = MatrixXd::Zero(4, 4);
  perm(0, 2) = perm(1, 0) = perm(2, 3) = perm(3, 1) = 1.0;
  const UnitaryFactorization pf = unitary_factorize(perm);
  CHECK((pf.u_padded.matrix() * pf.v_h.matrix() - perm.cast<Complex>()).norm() < 1e-12);

  const std::vector<InjectionDistribution> d{binary(1), binary(2)};
  const LineFlowMap m = orthonormalize_rows(build_line_map(vec({1.0, 1.0}), d));
  const MatrixXd sc(*m.m_sc);
  const UnitaryFactorization f = unitary_factorize(sc);
  const MatrixXcd prod = f.u_padded.matrix() * f.v_h.matrix();
  CHECK((prod.topRows(3) - sc.cast<Complex>()).norm() < 1e-10);
  CHECK(f.u_padded.residual() < 1e-10);
  CHECK(f.v_h.residual() < 1e-10);

  CHECK_THROWS_AS(unitary_factorize(2.0 * sc), ConsistencyError);
  CHECK_THROWS_AS(unitary_factorize(MatrixXd::Identity(3, 3)), DimensionError);
}

TEST_CASE("estimator vectors") {
  const std::vector<InjectionDistribution> d{binary(1), binary(2)};
  const LineFlowMap m = orthonormalize_rows(build_line_map(vec({1.0, 1.0}), d));
  const std::vector<EncodedInjection> enc{encode(d[0]), encode(d[1])};

  const EstimatorVector mean = build_estimator_vector(m, Metric::mean(), 2, enc);
  CHECK((mean.v - vec({0, std::sqrt(2.0), 2, 0})).norm() < 1e-15);
  CHECK(mean.scaling == doctest::Approx(std::sqrt(6.0) * 0.5));

  const EstimatorVector over = build_estimator_vector(m, Metric::overload(2.0), 2, enc);
  CHECK(over.v == vec({0, 0, 1, 0}));
  CHECK_FALSE(over.degenerate());

  const EstimatorVector none = build_estimator_vector(m, Metric::overload(2.5), 2, enc);
  CHECK(none.degenerate());
  CHECK(none.scaling == 0.0);

  const LineFlowMap raw = build_line_map(vec({1.0, 1.0}), d);
  CHECK_THROWS_AS(build_estimator_vector(raw, Metric::mean(), 2, enc), ValidationError);
}

TEST_CASE("householder estimator unitary") {
  const VectorXd last = vec({0, 0, 0, 3.0});
  CHECK(householder_unitary(last).matrix() == MatrixXcd::Identity(4, 4));

  MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK((householder_matrix<double>(vec({1.0, 0.0})) - swap).norm() < 1e-15);

  const VectorXd v = vec({0, std::sqrt(2.0), 2, 0});
  const MatrixXd h = householder_matrix<double>(v);
  CHECK(h(3, 0) == doctest::Approx(0.0));
  CHECK(h(3, 1) == doctest::Approx(std::sqrt(2.0) / std::sqrt(6.0)));
  CHECK(h(3, 2) == doctest::Approx(2.0 / std::sqrt(6.0)));
  CHECK(h(3, 3) == doctest::Approx(0.0));
  CHECK((h * h - MatrixXd::Identity(4, 4)).norm() < 1e-12);
  CHECK((h - h.transpose()).norm() < 1e-15);

  const Eigen::VectorXf vf = v.cast<float>();
  const Eigen::MatrixXf hf = householder_matrix<float>(vf);
  CHECK((hf * hf - Eigen::MatrixXf::Identity(4, 4)).norm() < 1e-5f);

  CHECK_THROWS_AS(householder_unitary(VectorXd::Zero(4)), ValidationError);
}

TEST_CASE("assembled pipeline") {
  const std::vector<UnitaryMatrix> prep{UnitaryMatrix::identity(2), UnitaryMatrix::identity(2)};
  const UnitaryFactorization ids{UnitaryMatrix::identity(4), UnitaryMatrix::identity(4)};
  const PipelineUnitary triv = assemble_pipeline(prep, ids, UnitaryMatrix::identity(4), 1.0);
  CHECK(triv.a.matrix() == MatrixXcd::Identity(4, 4));
  CHECK(triv.good_state_index == 3);
  CHECK(triv.target_amplitude() == 0.0);

  CHECK_THROWS_AS(assemble_pipeline(prep, ids, UnitaryMatrix::identity(8), 1.0), DimensionError);

  // Point masses at bins (1,1) with h = [1,1]: the loading is always 2.
  const std::vector<InjectionDistribution> pm{testing::point_mass(1, 1), testing::point_mass(2, 1)};
  const LinePipeline lp = build_line_pipeline(vec({1.0, 1.0}), pm, Metric::mean());
  REQUIRE(lp.pipeline);
  CHECK(lp.pipeline->target_amplitude() * lp.pipeline->scaling == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lp.pipeline->a.residual() < 1e-10);
}

TEST_CASE("end-to-end amplitude equals the enumerated metric") {
  std::mt19937_64 gen(2024);
  for (int t = 0; t < 60; ++t) {
    const auto inst = testing::random_instance(gen);
    const double mean = testing::enumerate_expectation(inst.h_row, inst.distributions,
                                                       [](double x) { return x; });
    const auto mean_lp = build_line_pipeline(inst.h_row, inst.distributions, Metric::mean());
    if (mean > 0.0) {
      REQUIRE(mean_lp.pipeline);
      CHECK(std::abs(mean_lp.pipeline->target_amplitude() * mean_lp.pipeline->scaling - mean) < 1e-9);
      CHECK(mean_lp.pipeline->target_amplitude() >= -1e-12);
    }

    const double t_hold = inst.threshold;
    const double over = testing::enumerate_expectation(
        inst.h_row, inst.distributions,
        [t_hold](double x) { return x >= t_hold - kLoadingTolerance ? 1.0 : 0.0; });
    const auto over_lp = build_line_pipeline(inst.h_row, inst.distributions, Metric::overload(t_hold));
    const double est = over_lp.pipeline
                           ? over_lp.pipeline->target_amplitude() * over_lp.pipeline->scaling
                           : 0.0;
    CHECK(std::abs(est - over) < 1e-9);
  }
}
