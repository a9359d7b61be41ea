#pragma once

#include <vector>

#include "usdkit/complex_matrix.hpp"

namespace usdkit {

/// Full singular value decomposition m = U diag(s) V^dagger. U and V are
/// square unitary; singular_values has length min(rows, cols), sorted
/// descending. Column phases are gauged so that the largest-magnitude entry
/// of each right singular vector is real positive.
struct SvdResult {
  std::vector<double> singular_values;
  ComplexMatrix left_vectors;   // columns |u_i>
  ComplexMatrix right_vectors;  // columns |v_i>

  double s_max() const { return singular_values.empty() ? 0.0 : singular_values.front(); }
  double s_min() const { return singular_values.empty() ? 0.0 : singular_values.back(); }
};

struct HermitianEig {
  std::vector<double> eigenvalues;  // descending
  ComplexMatrix eigenvectors;       // unitary, columns
};

/// One-sided Jacobi SVD. Accepts square or rectangular input.
/// Throws NonFinite / NoConvergence.
SvdResult svd(const ComplexMatrix& m);

/// Largest singular value (same code path as svd).
double spectral_norm(const ComplexMatrix& m);

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix. Throws
/// NotHermitian when the input fails the hermiticity tolerance.
HermitianEig hermitian_eig(const ComplexMatrix& m);

/// Inverse via the SVD; throws Singular when s_min <= singularity_rel * s_max
/// (linearly dependent columns).
ComplexMatrix inverse(const ComplexMatrix& m);

/// Hermitian PSD square root. Eigenvalues in [-psd_negative, 0) are clamped
/// to zero; anything more negative throws NegativeEigenvalue.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// Pairwise column overlaps: result(i, j) = <col_i | col_j>.
ComplexMatrix gram(const ComplexMatrix& states);

}  // namespace usdkit
