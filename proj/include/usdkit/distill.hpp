#pragma once

#include <vector>

#include "usdkit/lossy_operator.hpp"

namespace usdkit {

/// Pure bipartite state as its coefficient matrix: entry (k, i) is the
/// amplitude of |k>_A (x) |i>_B. Columns read as the side-A states |g_i>
/// attached to the side-B basis vectors.
class BipartiteState {
 public:
  explicit BipartiteState(ComplexMatrix coefficients);

  const ComplexMatrix& coefficients() const noexcept { return coefficients_; }
  double norm() const noexcept { return norm_; }
  int dim_a() const noexcept { return coefficients_.rows(); }
  int dim_b() const noexcept { return coefficients_.cols(); }

 private:
  ComplexMatrix coefficients_;
  double norm_;
};

/// coefficients = basis_a * diag(lambda) * basis_b^T; the |chi_i> columns of
/// basis_b are the conjugates of the right singular vectors, so a local
/// filter on side A acts on the coefficient matrix by plain left
/// multiplication.
struct SchmidtData {
  std::vector<double> coefficients_lambda;  // descending, >= 0
  ComplexMatrix basis_a;
  ComplexMatrix basis_b;
  int rank = 0;
};

SchmidtData schmidt(const BipartiteState& state);

struct DistillationPlan {
  LossyOperator filter;  // K_A = G^-1 / ||G^-1||, acts on side A
  double success_probability = 0.0;
  BipartiteState output_state;  // unnormalized; norm^2 = success_probability
};

/// Local filtering plan turning a normalized full-Schmidt-rank state into a
/// maximally entangled one. Throws RankDeficient / NotNormalized.
DistillationPlan plan_distillation(const BipartiteState& state);

/// rho = sum_i p_i |h_i><h_i| for normalized states h_i with priors p_i.
/// Its eigenvalues play the role of squared Schmidt coefficients.
ComplexMatrix usd_density_matrix(const StateSet& states);

/// Purification of usd_density_matrix: the bipartite state whose coefficient
/// columns are sqrt(p_i) * g_i_hat. Missing priors default to uniform. This
/// is the state whose Schmidt spectrum a family transform does (not) touch.
BipartiteState associated_bipartite_state(const StateSet& states);

}  // namespace usdkit
