#include <doctest.h>

#include <cmath>

#include "usdkit/error.hpp"
#include "usdkit/numkernel.hpp"
#include "usdkit/simulate.hpp"
#include "usdkit/usd.hpp"
#include "test_util.hpp"

using namespace usdkit;
using namespace testutil;

namespace {

StateSet normalized_optimal_pair(const LossyOperator& k) {
  const OptimalPair p = optimal_pair(k);
  return StateSet(
      ComplexMatrix::from_columns({normalized(p.g_plus), normalized(p.g_minus)}));
}

}  // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("dilation of a unitary has vanishing defect blocks") {
  auto rng = make_rng(501);
  const ComplexMatrix u = random_unitary(2, rng);
  const Dilation d = dilate(LossyOperator(u));
  REQUIRE(d.unitary.rows() == 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(d.unitary(i, j) - u(i, j)) <= 1e-14);
      CHECK(std::abs(d.unitary(i, 2 + j)) <= 1e-7);
      CHECK(std::abs(d.unitary(2 + i, j)) <= 1e-7);
      CHECK(std::abs(d.unitary(2 + i, 2 + j) + std::conj(u(j, i))) <= 1e-14);
    }
  }
  CHECK(unitarity_defect(d.unitary) <= 1e-10);
}

TEST_CASE("dilation of diag(1, 0.6) by hand") {
  const Dilation d = dilate(LossyOperator(ComplexMatrix::diagonal(std::vector<double>{1.0, 0.6})));
  // Defect blocks are diag(0, 0.8): 0.36 + 0.64 = 1 on each column.
  CHECK(d.unitary(1, 3).real() == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(d.unitary(3, 1).real() == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(std::abs(d.unitary(0, 2)) <= 1e-12);
  CHECK(unitarity_defect(d.unitary) <= 1e-12);
}

TEST_CASE("dilation of the zero operator is a swap") {
  const Dilation d = dilate(LossyOperator(ComplexMatrix::zero(2, 2)));
  ComplexMatrix expected(4, 4);
  expected(0, 2) = 1.0;
  expected(1, 3) = 1.0;
  expected(2, 0) = 1.0;
  expected(3, 1) = 1.0;
  CHECK(max_abs_diff(d.unitary, expected) <= 1e-14);
}

TEST_CASE("dilation is unitary with the operator in the top-left block") {
  auto rng = make_rng(502);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const LossyOperator k = random_passive_invertible(n, rng);
    const Dilation d = dilate(k);
    CHECK(unitarity_defect(d.unitary) <= 1e-10);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(d.unitary(i, j) == k.matrix()(i, j));
  }
}

TEST_CASE("dilation requires passivity") {
  CHECK_THROWS_WITH_AS(dilate(LossyOperator(2.0 * ComplexMatrix::identity(2))),
                       doctest::Contains("NotPassive"), Error);
}

TEST_CASE("orthonormal inputs under the identity are always conclusive") {
  const LossyOperator k(ComplexMatrix::identity(3));
  const StateSet states(ComplexMatrix::identity(3));
  const auto results = measure_usd(k, states, 5000, 7);
  REQUIRE(results.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(results[i].count_of(std::to_string(i)) == 5000);
    CHECK(results[i].count_of("inconclusive") == 0);
  }
}

TEST_CASE("golden detection probability for the optimal pair") {
  const LossyOperator k(ComplexMatrix::diagonal(std::vector<double>{0.5, 1.0}));
  const StateSet states = normalized_optimal_pair(k);
  const std::uint64_t shots = 1000000;
  const auto results = measure_usd(k, states, shots, 12345);

  // Analytic P_D = 0.4; binomial sigma = sqrt(0.4 * 0.6 / 1e6).
  const double sigma = std::sqrt(0.4 * 0.6 / static_cast<double>(shots));
  for (int i = 0; i < 2; ++i) {
    const double freq =
        static_cast<double>(shots - results[i].count_of("inconclusive")) / shots;
    CHECK(std::abs(freq - 0.4) <= 3.0 * sigma);
    // Zero misidentifications.
    CHECK(results[i].count_of(std::to_string(1 - i)) == 0);
  }
}

TEST_CASE("zero shots give empty counts") {
  const LossyOperator k(ComplexMatrix::identity(2));
  const StateSet states(ComplexMatrix::identity(2));
  const auto results = measure_usd(k, states, 0, 1);
  for (const auto& r : results) CHECK(r.counts.empty());
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  const LossyOperator k(ComplexMatrix::diagonal(std::vector<double>{0.5, 1.0}));
  const StateSet states = normalized_optimal_pair(k);
  const auto a = measure_usd(k, states, 20000, 99);
  const auto b = measure_usd(k, states, 20000, 99);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].counts == b[i].counts);

  const auto c = measure_usd(k, states, 20000, 100);
  bool any_difference = false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].counts != c[i].counts) any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("measure_usd preconditions") {
  const LossyOperator gain(2.0 * ComplexMatrix::identity(2));
  const StateSet basis(ComplexMatrix::identity(2));
  CHECK_THROWS_WITH_AS(measure_usd(gain, basis, 10, 0), doctest::Contains("NotPassive"), Error);

  const LossyOperator k(ComplexMatrix::diagonal(std::vector<double>{0.5, 1.0}));
  CHECK_THROWS_WITH_AS(measure_usd(k, StateSet(2.0 * ComplexMatrix::identity(2)), 10, 0),
                       doctest::Contains("NotNormalized"), Error);
  // diag(0.5, 1) does not discriminate e1 against the diagonal state.
  ComplexMatrix skewed(2, 2);
  skewed(0, 0) = 1.0;
  skewed(0, 1) = std::sqrt(0.5);
  skewed(1, 1) = std::sqrt(0.5);
  CHECK_THROWS_WITH_AS(measure_usd(k, StateSet(skewed), 10, 0),
                       doctest::Contains("NotDiscriminated"), Error);
}

TEST_CASE("distillation sampling matches the plan probability") {
  const BipartiteState golden(
      ComplexMatrix::diagonal(std::vector<double>{std::sqrt(0.8), std::sqrt(0.2)}));
  const DistillationPlan plan = plan_distillation(golden);
  const std::uint64_t shots = 1000000;
  const ShotResult r = measure_distillation(plan, shots, 777);
  const double freq = static_cast<double>(r.count_of("success")) / shots;
  const double sigma = std::sqrt(0.4 * 0.6 / static_cast<double>(shots));
  CHECK(std::abs(freq - 0.4) <= 3.0 * sigma);
  CHECK(r.count_of("success") + r.count_of("failure") == shots);
}

TEST_CASE("a maximally entangled state always succeeds") {
  const double v = std::sqrt(0.5);
  const DistillationPlan plan =
      plan_distillation(BipartiteState(ComplexMatrix::diagonal(std::vector<double>{v, v})));
  const ShotResult r = measure_distillation(plan, 100000, 3);
  CHECK(r.count_of("success") == 100000);
}

TEST_CASE("single-shot distillation counts sum to one") {
  const BipartiteState golden(
      ComplexMatrix::diagonal(std::vector<double>{std::sqrt(0.8), std::sqrt(0.2)}));
  const ShotResult r = measure_distillation(plan_distillation(golden), 1, 11);
  CHECK(r.count_of("success") + r.count_of("failure") == 1);
}

TEST_SUITE_END();
