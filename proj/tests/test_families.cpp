#include <doctest.h>

#include <cmath>

#include "usdkit/distill.hpp"
#include "usdkit/error.hpp"
#include "usdkit/families.hpp"
#include "usdkit/numkernel.hpp"
#include "usdkit/usd.hpp"
#include "test_util.hpp"

using namespace usdkit;
using namespace testutil;

namespace {

constexpr double kPi = 3.14159265358979323846;

StateSet canonical_set(const LossyOperator& k, std::mt19937_64& rng) {
  // Columns of K^-1 U_0: discriminated by construction, uniform weights.
  return StateSet(inverse(k.matrix()) * random_unitary(k.dim(), rng));
}

std::vector<double> random_phases(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-kPi, kPi);
  std::vector<double> p(n);
  for (double& x : p) x = dist(rng);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("families");

TEST_CASE("zero phases give the identity transform") {
  auto rng = make_rng(401);
  const LossyOperator k = random_passive_invertible(3, rng);
  const PhaseTransform t = phase_transform(k, {0.0, 0.0, 0.0});
  CHECK(max_abs_diff(t.input_transform, ComplexMatrix::identity(3)) <= 1e-12);
  CHECK(max_abs_diff(t.output_transform, ComplexMatrix::identity(3)) <= 1e-12);

  const StateSet states = canonical_set(k, rng);
  const StateSet same = apply_phase_family(k, states, {0.0, 0.0, 0.0});
  CHECK(max_abs_diff(same.states(), states.states()) <= 1e-12);
}

TEST_CASE("a pi phase flips one singular direction of diag(0.5, 1)") {
  const LossyOperator k(ComplexMatrix::diagonal(std::vector<double>{0.5, 1.0}));
  // Phases attach to singular vectors in descending order: v_0 = e2, v_1 = e1.
  const PhaseTransform t = phase_transform(k, {kPi, 0.0});
  CHECK(max_abs_diff(t.input_transform,
                     ComplexMatrix::diagonal(std::vector<double>{1.0, -1.0})) <= 1e-12);

  const OptimalPair p = optimal_pair(k);
  const StateSet pair(ComplexMatrix::from_columns({p.g_plus, p.g_minus}));
  const StateSet flipped = apply_phase_family(k, pair, {kPi, 0.0});
  CHECK(normalized_offdiag_max(gram(k.matrix() * flipped.states())) <= 1e-12);
}

TEST_CASE("phase family preserves the output Gram matrix") {
  auto rng = make_rng(402);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const LossyOperator k = random_passive_invertible(n, rng);
    const StateSet states = canonical_set(k, rng);
    const std::vector<double> phases = random_phases(n, rng);
    const StateSet moved = apply_phase_family(k, states, phases);

    const ComplexMatrix before = gram(k.matrix() * states.states());
    const ComplexMatrix after = gram(k.matrix() * moved.states());
    CHECK(max_abs_diff(before, after) <= 1e-9);
    CHECK(normalized_offdiag_max(after) <= 1e-9);

    // New outputs relate to the old ones through the output-side transform.
    const PhaseTransform t = phase_transform(k, phases);
    CHECK(max_abs_diff(k.matrix() * moved.states(),
                       t.output_transform * (k.matrix() * states.states())) <= 1e-9);
    CHECK(is_unitary(t.input_transform, 1e-10));
    CHECK(is_unitary(t.output_transform, 1e-10));
  }
}

TEST_CASE("positive operators commute with their phase transforms") {
  auto rng = make_rng(403);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    // Hermitian PSD K = V diag(s) V^dagger.
    const ComplexMatrix v = random_unitary(n, rng);
    const std::vector<double> s = random_spectrum(n, rng);
    ComplexMatrix vs(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) vs(i, j) = v(i, j) * s[j];
    const LossyOperator k(vs * v.adjoint());

    const PhaseTransform t = phase_transform(k, random_phases(n, rng));
    const ComplexMatrix kw = k.matrix() * t.input_transform;
    const ComplexMatrix wk = t.input_transform * k.matrix();
    CHECK(frob_diff(kw, wk) <= 1e-10);
  }
}

TEST_CASE("phase family preconditions") {
  auto rng = make_rng(404);
  const LossyOperator k = random_passive_invertible(2, rng);
  const StateSet states = canonical_set(k, rng);
  CHECK_THROWS_WITH_AS(apply_phase_family(k, states, {0.0}),
                       doctest::Contains("LengthMismatch"), Error);

  ComplexMatrix bad(2, 2);
  bad(0, 0) = 1.0;
  bad(0, 1) = 1.0;
  bad(1, 1) = 0.2;
  CHECK_THROWS_WITH_AS(apply_phase_family(k, StateSet(bad), {0.0, 0.0}),
                       doctest::Contains("NotDiscriminated"), Error);
}

TEST_CASE("degeneracy structure clusters singular values") {
  const DegeneracyStructure all_one =
      degeneracy_structure(LossyOperator(ComplexMatrix::identity(3)));
  REQUIRE(all_one.groups.size() == 1);
  CHECK(all_one.groups[0] == std::vector<int>{0, 1, 2});

  const DegeneracyStructure split = degeneracy_structure(
      LossyOperator(ComplexMatrix::diagonal(std::vector<double>{1.0, 1.0, 0.5})));
  REQUIRE(split.groups.size() == 2);
  CHECK(split.groups[0] == std::vector<int>{0, 1});
  CHECK(split.groups[1] == std::vector<int>{2});

  // A 1e-12 gap is degenerate at the default tolerance.
  const DegeneracyStructure near = degeneracy_structure(
      LossyOperator(ComplexMatrix::diagonal(std::vector<double>{1.0, 1.0 - 1e-12, 0.5})));
  REQUIRE(near.groups.size() == 2);
  CHECK(near.groups[0] == std::vector<int>{0, 1});

  // An explicit tolerance overrides the default.
  const DegeneracyStructure fine = degeneracy_structure(
      LossyOperator(ComplexMatrix::diagonal(std::vector<double>{1.0, 1.0 - 1e-12, 0.5})),
      1e-14);
  CHECK(fine.groups.size() == 3);
}

TEST_CASE("mixing an exactly degenerate pair keeps outputs orthogonal") {
  auto rng = make_rng(405);
  const ComplexMatrix u = random_unitary(3, rng);
  const ComplexMatrix v = random_unitary(3, rng);
  const std::vector<double> s{1.0, 1.0, 0.5};
  ComplexMatrix us(3, 3);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) us(i, j) = u(i, j) * s[j];
  const LossyOperator k(us * v.adjoint());

  const StateSet states = canonical_set(k, rng);
  const double c = std::cos(0.7), sn = std::sin(0.7);
  ComplexMatrix rot(2, 2);
  rot(0, 0) = c;
  rot(0, 1) = -sn;
  rot(1, 0) = sn;
  rot(1, 1) = c;
  const MixerResult mixed =
      apply_degenerate_mixer(k, states, {rot, ComplexMatrix::identity(1)});
  CHECK(mixed.output_gram_residual <= 1e-10);
  CHECK(normalized_offdiag_max(gram(k.matrix() * mixed.states.states())) <= 1e-10);
}

TEST_CASE("a fully degenerate operator accepts any unitary mixer") {
  auto rng = make_rng(406);
  const LossyOperator k(ComplexMatrix::identity(3));
  const StateSet states(random_unitary(3, rng));
  const MixerResult mixed = apply_degenerate_mixer(k, states, {random_unitary(3, rng)});
  CHECK(mixed.output_gram_residual <= 1e-10);
}

TEST_CASE("singleton groups reduce the mixer to the phase family") {
  auto rng = make_rng(407);
  const LossyOperator k(
      operator_with_spectrum(std::vector<double>{1.0, 0.7, 0.4}, rng));
  const StateSet states = canonical_set(k, rng);
  const std::vector<double> phases{0.3, -1.2, 2.5};

  std::vector<ComplexMatrix> blocks;
  for (double phi : phases) {
    ComplexMatrix b(1, 1);
    b(0, 0) = std::polar(1.0, phi);
    blocks.push_back(b);
  }
  const MixerResult mixed = apply_degenerate_mixer(k, states, blocks);
  const StateSet phased = apply_phase_family(k, states, phases);
  CHECK(max_abs_diff(mixed.states.states(), phased.states()) <= 1e-12);
}

TEST_CASE("mixer preconditions") {
  auto rng = make_rng(408);
  const LossyOperator k(
      operator_with_spectrum(std::vector<double>{1.0, 0.7, 0.4}, rng));
  const StateSet states = canonical_set(k, rng);
  CHECK_THROWS_WITH_AS(apply_degenerate_mixer(k, states, {ComplexMatrix::identity(3)}),
                       doctest::Contains("BlockSizeMismatch"), Error);
  std::vector<ComplexMatrix> bad{ComplexMatrix::identity(1), ComplexMatrix::identity(1),
                                 2.0 * ComplexMatrix::identity(1)};
  CHECK_THROWS_WITH_AS(apply_degenerate_mixer(k, states, bad), doctest::Contains("NotUnitary"),
                       Error);
}

TEST_CASE("distillation family: identity gives the canonical set") {
  auto rng = make_rng(409);
  const LossyOperator k = random_passive_invertible(3, rng);
  const DistillationFamily f = distillation_family(k, ComplexMatrix::identity(3));
  CHECK(max_abs_diff(f.states.states(), inverse(k.matrix())) <= 1e-12);
  CHECK(max_abs_diff(f.input_gram, f.canonical_gram) <= 1e-12);
  CHECK(max_abs_diff(k.matrix() * f.states.states(), ComplexMatrix::identity(3)) <= 1e-9);
}

TEST_CASE("distillation family: K maps the new set onto U_0") {
  auto rng = make_rng(410);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const LossyOperator k = random_passive_invertible(n, rng);
    const ComplexMatrix u0 = random_unitary(n, rng);
    const DistillationFamily f = distillation_family(k, u0);
    CHECK(max_abs_diff(k.matrix() * f.states.states(), u0) <= 1e-9);
    CHECK(max_abs_diff(gram(k.matrix() * f.states.states()), ComplexMatrix::identity(n)) <=
          1e-9);
  }
}

TEST_CASE("a rotated U_0 changes the input angles") {
  const LossyOperator k(ComplexMatrix::diagonal(std::vector<double>{0.5, 1.0}));
  const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
  ComplexMatrix u0(2, 2);
  u0(0, 0) = c;
  u0(0, 1) = -s;
  u0(1, 0) = s;
  u0(1, 1) = c;
  const DistillationFamily f = distillation_family(k, u0);
  // K^-1 columns are orthogonal; the rotated family is not.
  CHECK(std::abs(f.canonical_gram(0, 1)) <= 1e-12);
  CHECK(std::abs(f.input_gram(0, 1)) > 1e-3);
}

TEST_CASE("diagonal phases only rephase the canonical columns") {
  auto rng = make_rng(411);
  const LossyOperator k = random_passive_invertible(2, rng);
  ComplexMatrix u0(2, 2);
  u0(0, 0) = std::polar(1.0, 0.4);
  u0(1, 1) = std::polar(1.0, -1.1);
  const DistillationFamily f = distillation_family(k, u0);
  const ComplexMatrix k_inv = inverse(k.matrix());
  for (int j = 0; j < 2; ++j) {
    const Vector a = f.states.state(j);
    const Vector b = k_inv.col(j);
    // Parallel columns: |<a|b>| = |a||b|.
    CHECK(std::abs(inner(a, b)) == doctest::Approx(norm(a) * norm(b)).epsilon(1e-12));
  }
}

TEST_CASE("distillation family preconditions") {
  auto rng = make_rng(412);
  const LossyOperator k = random_passive_invertible(2, rng);
  CHECK_THROWS_WITH_AS(distillation_family(k, 2.0 * ComplexMatrix::identity(2)),
                       doctest::Contains("NotUnitary"), Error);
  ComplexMatrix singular(2, 2);
  singular(0, 1) = 1.0;
  CHECK_THROWS_WITH_AS(distillation_family(LossyOperator(singular), ComplexMatrix::identity(2)),
                       doctest::Contains("NonInvertible"), Error);
}

TEST_CASE("W and V preserve the associated Schmidt spectrum; U_0 does not") {
  auto rng = make_rng(413);
  const LossyOperator k = random_passive_invertible(3, rng);
  const StateSet states = canonical_set(k, rng);
  const SchmidtData base = schmidt(associated_bipartite_state(states));

  // Phase transform: spectrum unchanged.
  const StateSet phased = apply_phase_family(k, states, random_phases(3, rng));
  const SchmidtData after_w = schmidt(associated_bipartite_state(phased));
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(base.coefficients_lambda[i] - after_w.coefficients_lambda[i]) <= 1e-10);
  }

  // Degenerate mixer (unitary as well): spectrum unchanged.
  const LossyOperator kd(operator_with_spectrum(std::vector<double>{0.9, 0.9, 0.4}, rng));
  const StateSet states_d = canonical_set(kd, rng);
  const SchmidtData base_d = schmidt(associated_bipartite_state(states_d));
  const MixerResult mixed = apply_degenerate_mixer(
      kd, states_d, {random_unitary(2, rng), ComplexMatrix::identity(1)});
  const SchmidtData after_v = schmidt(associated_bipartite_state(mixed.states));
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(base_d.coefficients_lambda[i] - after_v.coefficients_lambda[i]) <= 1e-10);
  }

  // Some U_0 produces a different spectrum for the canonical family.
  const SchmidtData canon = schmidt(associated_bipartite_state(
      distillation_family(k, ComplexMatrix::identity(3)).states));
  bool changed = false;
  for (int attempt = 0; attempt < 5 && !changed; ++attempt) {
    const DistillationFamily f = distillation_family(k, random_unitary(3, rng));
    const SchmidtData moved = schmidt(associated_bipartite_state(f.states));
    for (int i = 0; i < 3; ++i) {
      if (std::abs(moved.coefficients_lambda[i] - canon.coefficients_lambda[i]) > 1e-6) {
        changed = true;
      }
    }
  }
  CHECK(changed);
}

TEST_CASE("inconclusive analysis of a unitary operator") {
  auto rng = make_rng(414);
  const LossyOperator k(random_unitary(2, rng));
  const InconclusiveAnalysis a =
      inconclusive_analysis(k, 0.5 * ComplexMatrix::identity(2));
  CHECK(a.m_question.max_abs() <= 1e-7);  // sqrt amplifies the 1e-15 spectral slack
  CHECK(a.rho_question.max_abs() <= 1e-12);
  CHECK(a.rank == 0);
  CHECK(std::abs(a.inconclusive_trace) <= 1e-12);

  const InconclusiveAnalysis exact =
      inconclusive_analysis(LossyOperator(ComplexMatrix::identity(2)),
                            0.5 * ComplexMatrix::identity(2));
  CHECK(exact.rho_question.max_abs() == 0.0);
}

TEST_CASE("one lossy direction pins the inconclusive state") {
  const LossyOperator k(ComplexMatrix::diagonal(std::vector<double>{1.0, 0.6}));
  auto rng = make_rng(415);
  for (int trial = 0; trial < 10; ++trial) {
    // Random density matrix.
    const ComplexMatrix b = random_matrix(2, 2, rng);
    ComplexMatrix rho = b * b.adjoint();
    rho = (1.0 / rho.trace().real()) * rho;
    const InconclusiveAnalysis a = inconclusive_analysis(k, rho);
    CHECK(max_abs_diff(a.m_question, ComplexMatrix::diagonal(std::vector<double>{0.0, 0.8})) <=
          1e-12);
    CHECK(a.rank <= 1);
  }
}

TEST_CASE("uniform losses keep the inconclusive state full rank") {
  const LossyOperator k(ComplexMatrix::diagonal(std::vector<double>{0.5, 0.5}));
  const InconclusiveAnalysis a = inconclusive_analysis(k, 0.5 * ComplexMatrix::identity(2));
  CHECK(max_abs_diff(a.rho_question, 0.375 * ComplexMatrix::identity(2)) <= 1e-12);
  CHECK(a.rank == 2);
  CHECK(a.inconclusive_trace == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("inconclusive analysis preconditions") {
  const LossyOperator gain(2.0 * ComplexMatrix::identity(2));
  CHECK_THROWS_WITH_AS(inconclusive_analysis(gain, 0.5 * ComplexMatrix::identity(2)),
                       doctest::Contains("NotPassive"), Error);

  const LossyOperator k(ComplexMatrix::diagonal(std::vector<double>{1.0, 0.6}));
  CHECK_THROWS_WITH_AS(inconclusive_analysis(k, ComplexMatrix::identity(2)),
                       doctest::Contains("NotDensityMatrix"), Error);
  ComplexMatrix skew(2, 2);
  skew(0, 0) = 1.0;
  skew(0, 1) = 0.5;
  CHECK_THROWS_WITH_AS(inconclusive_analysis(k, skew), doctest::Contains("NotDensityMatrix"),
                       Error);
}

TEST_SUITE_END();
