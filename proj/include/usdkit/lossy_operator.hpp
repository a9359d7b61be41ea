#pragma once

#include <optional>
#include <vector>

#include "usdkit/complex_matrix.hpp"
#include "usdkit/numkernel.hpp"

namespace usdkit {

/// A validated square evolution operator K with its SVD cached at
/// construction. Unitary K is a legal degenerate case (discrimination angle
/// pi/2); K^dagger K != I is not required.
class LossyOperator {
 public:
  explicit LossyOperator(ComplexMatrix k);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const SvdResult& svd() const noexcept { return svd_; }
  int dim() const noexcept { return matrix_.rows(); }

  double s_max() const noexcept { return svd_.s_max(); }
  double s_min() const noexcept { return svd_.s_min(); }
  bool passive() const noexcept { return passive_; }
  bool invertible() const noexcept { return invertible_; }

 private:
  ComplexMatrix matrix_;
  SvdResult svd_;
  bool passive_ = false;
  bool invertible_ = false;
};

/// Columns are the (possibly non-normalized) input states; priors, when
/// present, are per-state preparation probabilities.
class StateSet {
 public:
  explicit StateSet(ComplexMatrix states);
  StateSet(ComplexMatrix states, std::vector<double> priors);

  int dim() const noexcept { return states_.rows(); }
  int count() const noexcept { return states_.cols(); }
  const ComplexMatrix& states() const noexcept { return states_; }
  Vector state(int i) const { return states_.col(i); }
  const std::optional<std::vector<double>>& priors() const noexcept { return priors_; }

 private:
  ComplexMatrix states_;
  std::optional<std::vector<double>> priors_;
};

}  // namespace usdkit
