#include "usdkit/distill.hpp"

#include <cmath>

#include "usdkit/error.hpp"
#include "usdkit/numkernel.hpp"
#include "usdkit/tolerances.hpp"

namespace usdkit {

BipartiteState::BipartiteState(ComplexMatrix coefficients)
    : coefficients_(std::move(coefficients)) {
  if (coefficients_.rows() == 0 || coefficients_.cols() == 0) {
    fail(ErrorCode::DimensionMismatch, "empty coefficient matrix");
  }
  if (!coefficients_.is_finite()) fail(ErrorCode::NonFinite, "coefficients contain NaN/Inf");
  norm_ = coefficients_.frobenius_norm();
}

SchmidtData schmidt(const BipartiteState& state) {
  if (state.norm() <= 1e-15) fail(ErrorCode::ZeroState, "zero bipartite state");
  const SvdResult f = svd(state.coefficients());
  SchmidtData d;
  d.coefficients_lambda = f.singular_values;
  d.basis_a = f.left_vectors;
  d.basis_b = f.right_vectors.conjugate();
  d.rank = 0;
  for (double lambda : d.coefficients_lambda) {
    if (lambda > tol::schmidt_rank) ++d.rank;
  }
  return d;
}

DistillationPlan plan_distillation(const BipartiteState& state) {
  const int n = state.dim_a();
  if (std::abs(state.norm() - 1.0) > tol::normalization) {
    fail(ErrorCode::NotNormalized, "state must be normalized");
  }
  const SchmidtData sd = schmidt(state);
  if (sd.rank < n) {
    fail(ErrorCode::RankDeficient, "Schmidt rank is below the side-A dimension");
  }

  // G has the side-A states as columns. For a square coefficient matrix that
  // is the matrix itself; otherwise rotate side B to its Schmidt basis first,
  // which truncates the coefficient matrix to A * diag(lambda).
  ComplexMatrix g(n, n);
  if (state.dim_b() == n) {
    g = state.coefficients();
  } else {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) g(i, j) = sd.basis_a(i, j) * sd.coefficients_lambda[j];
    }
  }

  const ComplexMatrix g_inv = inverse(g);
  const double g_inv_norm = spectral_norm(g_inv);
  LossyOperator filter((1.0 / g_inv_norm) * g_inv);

  BipartiteState output(filter.matrix() * state.coefficients());
  const double p = static_cast<double>(n) / (g_inv_norm * g_inv_norm);

  return DistillationPlan{std::move(filter), std::min(p, 1.0), std::move(output)};
}

ComplexMatrix usd_density_matrix(const StateSet& states) {
  if (!states.priors()) fail(ErrorCode::MissingPriors, "density matrix requires priors");
  const int n = states.dim();
  for (int i = 0; i < states.count(); ++i) {
    if (std::abs(norm(states.state(i)) - 1.0) > tol::normalization) {
      fail(ErrorCode::NotNormalized, "states must be normalized");
    }
  }
  ComplexMatrix rho(n, n);
  for (int s = 0; s < states.count(); ++s) {
    const Vector h = states.state(s);
    const double p = (*states.priors())[s];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rho(i, j) += p * h[i] * std::conj(h[j]);
  }
  return rho;
}

BipartiteState associated_bipartite_state(const StateSet& states) {
  const int m = states.count();
  ComplexMatrix c(states.dim(), m);
  for (int j = 0; j < m; ++j) {
    const double p = states.priors() ? (*states.priors())[j] : 1.0 / m;
    c.set_col(j, scaled(std::sqrt(p), normalized(states.state(j))));
  }
  return BipartiteState(std::move(c));
}

}  // namespace usdkit
