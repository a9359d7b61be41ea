#pragma once

#include <optional>
#include <vector>

#include "usdkit/lossy_operator.hpp"
#include "usdkit/tolerances.hpp"

namespace usdkit {

/// Input-independent discrimination summary of an operator. When K is not
/// invertible it cannot discriminate any linearly independent set:
/// discriminating = false, best_angle_rad = 0 and the bounds are absent.
struct AnalysisReport {
  std::vector<double> singular_values;
  double spectral_norm = 0.0;
  bool passive = false;
  bool discriminating = false;
  double best_angle_rad = 0.0;
  std::optional<double> angle_lower_bound;
  std::optional<double> angle_upper_bound;
  std::optional<double> condition_product;  // ||K|| * ||K^-1||
};

AnalysisReport analyze(const LossyOperator& k);

/// Smallest angle K can discriminate: 2 atan(s_min / s_max).
/// Throws NonInvertible.
double best_angle(const LossyOperator& k);

/// The extremal input pair g+- = s_min |v_max> +- s_max |v_min> together with
/// its (orthogonal) images under K. When all singular values coincide any
/// orthogonal pair is optimal; the extremal singular vectors are returned and
/// degenerate_optimum is set.
struct OptimalPair {
  Vector g_plus;
  Vector g_minus;
  Vector out_plus;
  Vector out_minus;
  double angle_rad = 0.0;
  double detection_probability = 0.0;
  bool degenerate_optimum = false;
};

OptimalPair optimal_pair(const LossyOperator& k);

/// Builds K = U_out Lambda G^-1 mapping state i to Lambda_ii * (column i of
/// U_out). Default weights are uniform, Lambda = I / ||G^-1||, which makes
/// s_max(K) = 1. Explicit weights are rescaled uniformly if they would make K
/// non-passive (ratios preserved). With fewer states than dimensions G is
/// completed with an orthonormal basis of the complement at unit weight.
LossyOperator synthesize_discriminator(const StateSet& states,
                                       std::optional<std::vector<double>> weights = {},
                                       std::optional<ComplexMatrix> output_basis = {});

/// True when the sorted singular values agree within tol * max(s_max).
bool are_usd_equivalent(const LossyOperator& a, const LossyOperator& b,
                        double tol = tol::equivalence_rel);

struct PopulationReport {
  std::vector<std::vector<double>> overlaps;  // overlaps[state][i] = |<g_hat|v_i>|
  bool fully_populated = false;
  bool completely_non_orthogonal = false;
  double min_pairwise_angle_rad = 0.0;
};

/// Singular-vector population table for a set K discriminates (the output
/// Gram must be diagonal within ortho_tol, else NotDiscriminated). States are
/// normalized before taking overlaps so the population cutoff is scale-free.
PopulationReport population_report(const LossyOperator& k, const StateSet& states,
                                   double ortho_tol = tol::orthogonality);

/// Minimum over pairs of acos |<g_i_hat | g_j_hat>|. Throws ZeroState.
double min_pairwise_angle(const StateSet& states);

namespace internal {

/// Verification helper for tests, not part of the public surface: reduces a
/// discriminated pair to real 2-vectors in the sum-difference bases. g2 is
/// phase-rotated first so <g2|g1> > 0. Inputs reduce to (x_in, +-y_in) and
/// the K-images to (x_out, y_out) / (x_out2, -y_out2); residual is the worst
/// imaginary part / off-plane leakage encountered.
struct TwoStateReduction {
  double x_in = 0.0;
  double y_in = 0.0;
  double x_out = 0.0;
  double y_out = 0.0;
  double x_out2 = 0.0;
  double y_out2 = 0.0;
  double angle_rad = 0.0;
  double residual = 0.0;
};

TwoStateReduction reduce_to_2d(const LossyOperator& k, const Vector& g1, const Vector& g2,
                               double ortho_tol = tol::orthogonality);

}  // namespace internal

}  // namespace usdkit
