#pragma once

#include <optional>
#include <vector>

#include "usdkit/lossy_operator.hpp"
#include "usdkit/tolerances.hpp"

namespace usdkit {

/// W = sum_i e^{i phi_i} |v_i><v_i| and its output-side twin built from the
/// same cached SVD, so phases stay paired even across degenerate vectors.
struct PhaseTransform {
  std::vector<double> phases;
  ComplexMatrix input_transform;
  ComplexMatrix output_transform;
};

PhaseTransform phase_transform(const LossyOperator& k, const std::vector<double>& phases);

/// Returns {W |g_i>}: a new set discriminated by the same K, with outputs
/// rotated by the output-side transform. Throws LengthMismatch /
/// NotDiscriminated.
StateSet apply_phase_family(const LossyOperator& k, const StateSet& states,
                            const std::vector<double>& phases,
                            double ortho_tol = tol::orthogonality);

/// Clusters of (descending) singular values closer than the tolerance.
/// Groups hold indices into k.svd().singular_values.
struct DegeneracyStructure {
  std::vector<std::vector<int>> groups;
  double tolerance_used = 0.0;
};

DegeneracyStructure degeneracy_structure(const LossyOperator& k,
                                         std::optional<double> tolerance = {});

struct MixerResult {
  StateSet states;
  /// Largest normalized off-diagonal of the output Gram after mixing. Exact
  /// degeneracy keeps this at rounding level; near-degenerate groups leak
  /// proportionally to their singular-value spread.
  double output_gram_residual = 0.0;
};

/// Applies V = (block-diagonal unitary in the singular-vector basis), one
/// block per degeneracy group. Throws BlockSizeMismatch / NotUnitary /
/// NotDiscriminated.
MixerResult apply_degenerate_mixer(const LossyOperator& k, const StateSet& states,
                                   const std::vector<ComplexMatrix>& block_unitaries,
                                   double ortho_tol = tol::orthogonality);

struct DistillationFamily {
  StateSet states;             // columns of K^-1 U_0
  ComplexMatrix input_gram;    // Gram of the new set
  ComplexMatrix canonical_gram;  // Gram of K^-1's columns, for comparison
};

/// The non-unitary family: G~ = K^-1 U_0 satisfies K G~ = U_0, i.e. uniform
/// weight discrimination onto the orthonormal columns of U_0.
DistillationFamily distillation_family(const LossyOperator& k, const ComplexMatrix& u0);

struct InconclusiveAnalysis {
  ComplexMatrix m_question;    // sqrt(I - K^dagger K)
  ComplexMatrix e_question;    // I - K^dagger K
  ComplexMatrix rho_question;  // M_? rho M_?, unnormalized
  int rank = 0;
  double inconclusive_trace = 0.0;  // tr(rho_?) = inconclusive probability
};

/// Post-measurement analysis of the inconclusive branch. Throws NotPassive /
/// NotDensityMatrix.
InconclusiveAnalysis inconclusive_analysis(const LossyOperator& k, const ComplexMatrix& rho);

}  // namespace usdkit
