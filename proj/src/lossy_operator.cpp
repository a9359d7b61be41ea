#include "usdkit/lossy_operator.hpp"

#include <cmath>

#include "usdkit/error.hpp"
#include "usdkit/tolerances.hpp"

namespace usdkit {

LossyOperator::LossyOperator(ComplexMatrix k) : matrix_(std::move(k)) {
  if (!matrix_.is_square() || matrix_.rows() == 0) {
    fail(ErrorCode::DimensionMismatch, "lossy operator must be square and non-empty");
  }
  if (!matrix_.is_finite()) fail(ErrorCode::NonFinite, "lossy operator contains NaN/Inf");
  svd_ = usdkit::svd(matrix_);
  passive_ = svd_.s_max() <= 1.0 + tol::passivity_slack;
  invertible_ = svd_.s_min() > tol::singularity_rel * svd_.s_max();
}

StateSet::StateSet(ComplexMatrix states) : states_(std::move(states)) {
  if (states_.rows() == 0 || states_.cols() == 0) {
    fail(ErrorCode::DimensionMismatch, "state set must be non-empty");
  }
  if (states_.cols() > states_.rows()) {
    fail(ErrorCode::DimensionMismatch, "more states than dimensions");
  }
  if (!states_.is_finite()) fail(ErrorCode::NonFinite, "state set contains NaN/Inf");
}

StateSet::StateSet(ComplexMatrix states, std::vector<double> priors) : StateSet(std::move(states)) {
  if (static_cast<int>(priors.size()) != count()) {
    fail(ErrorCode::LengthMismatch, "one prior per state required");
  }
  double sum = 0.0;
  for (double p : priors) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::NotDensityMatrix, "priors must lie in [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::normalization) {
    fail(ErrorCode::NotNormalized, "priors must sum to 1");
  }
  // Renormalize exactly so downstream trace identities hold to 1e-12.
  for (double& p : priors) p /= sum;
  priors_ = std::move(priors);
}

}  // namespace usdkit
