#include "usdkit/families.hpp"

#include <cmath>
#include <complex>

#include "usdkit/error.hpp"
#include "usdkit/numkernel.hpp"

namespace usdkit {

namespace {

ComplexMatrix spectral_phase_matrix(const ComplexMatrix& vectors,
                                    const std::vector<double>& phases) {
  const int n = vectors.rows();
  ComplexMatrix scaled_cols(n, n);
  for (int j = 0; j < n; ++j) {
    const Complex w = std::polar(1.0, phases[j]);
    for (int i = 0; i < n; ++i) scaled_cols(i, j) = w * vectors(i, j);
  }
  return scaled_cols * vectors.adjoint();
}

void require_discriminated(const LossyOperator& k, const StateSet& states, double ortho_tol) {
  const ComplexMatrix out_gram = gram(k.matrix() * states.states());
  if (normalized_offdiag_max(out_gram) > ortho_tol) {
    fail(ErrorCode::NotDiscriminated, "K does not map the set to orthogonal outputs");
  }
}

}  // namespace

PhaseTransform phase_transform(const LossyOperator& k, const std::vector<double>& phases) {
  if (static_cast<int>(phases.size()) != k.dim()) {
    fail(ErrorCode::LengthMismatch, "one phase per singular vector required");
  }
  PhaseTransform t;
  t.phases = phases;
  t.input_transform = spectral_phase_matrix(k.svd().right_vectors, phases);
  t.output_transform = spectral_phase_matrix(k.svd().left_vectors, phases);
  return t;
}

StateSet apply_phase_family(const LossyOperator& k, const StateSet& states,
                            const std::vector<double>& phases, double ortho_tol) {
  require_discriminated(k, states, ortho_tol);
  const PhaseTransform t = phase_transform(k, phases);
  ComplexMatrix transformed = t.input_transform * states.states();
  if (states.priors()) return StateSet(std::move(transformed), *states.priors());
  return StateSet(std::move(transformed));
}

DegeneracyStructure degeneracy_structure(const LossyOperator& k, std::optional<double> tolerance) {
  DegeneracyStructure d;
  d.tolerance_used = tolerance.value_or(tol::degeneracy_rel * k.s_max());
  const std::vector<double>& s = k.svd().singular_values;
  std::vector<int> current{0};
  for (int i = 1; i < static_cast<int>(s.size()); ++i) {
    if (s[i - 1] - s[i] <= d.tolerance_used) {
      current.push_back(i);
    } else {
      d.groups.push_back(std::move(current));
      current = {i};
    }
  }
  d.groups.push_back(std::move(current));
  return d;
}

MixerResult apply_degenerate_mixer(const LossyOperator& k, const StateSet& states,
                                   const std::vector<ComplexMatrix>& block_unitaries,
                                   double ortho_tol) {
  require_discriminated(k, states, ortho_tol);
  const DegeneracyStructure d = degeneracy_structure(k);
  if (block_unitaries.size() != d.groups.size()) {
    fail(ErrorCode::BlockSizeMismatch, "one unitary per degeneracy group required");
  }

  const int n = k.dim();
  ComplexMatrix block(n, n);
  for (size_t g = 0; g < d.groups.size(); ++g) {
    const std::vector<int>& idx = d.groups[g];
    const ComplexMatrix& u = block_unitaries[g];
    const int sz = static_cast<int>(idx.size());
    if (u.rows() != sz || u.cols() != sz) {
      fail(ErrorCode::BlockSizeMismatch, "block unitary size does not match its group");
    }
    if (!is_unitary(u, 1e-9)) fail(ErrorCode::NotUnitary, "block is not unitary");
    for (int a = 0; a < sz; ++a)
      for (int b = 0; b < sz; ++b) block(idx[a], idx[b]) = u(a, b);
  }

  const ComplexMatrix& vecs = k.svd().right_vectors;
  const ComplexMatrix mixer = vecs * block * vecs.adjoint();
  ComplexMatrix transformed = mixer * states.states();
  const double residual = normalized_offdiag_max(gram(k.matrix() * transformed));

  StateSet out = states.priors() ? StateSet(std::move(transformed), *states.priors())
                                 : StateSet(std::move(transformed));
  return MixerResult{std::move(out), residual};
}

DistillationFamily distillation_family(const LossyOperator& k, const ComplexMatrix& u0) {
  if (!k.invertible()) fail(ErrorCode::NonInvertible, "operator is not invertible");
  if (u0.rows() != k.dim() || u0.cols() != k.dim()) {
    fail(ErrorCode::DimensionMismatch, "U_0 must match the operator dimension");
  }
  if (!is_unitary(u0, 1e-9)) fail(ErrorCode::NotUnitary, "U_0 is not unitary");

  const ComplexMatrix k_inv = inverse(k.matrix());
  ComplexMatrix g_tilde = k_inv * u0;
  DistillationFamily f{StateSet(g_tilde), gram(g_tilde), gram(k_inv)};
  return f;
}

InconclusiveAnalysis inconclusive_analysis(const LossyOperator& k, const ComplexMatrix& rho) {
  if (!k.passive()) fail(ErrorCode::NotPassive, "I - K^dagger K is indefinite");
  if (rho.rows() != k.dim() || rho.cols() != k.dim()) {
    fail(ErrorCode::DimensionMismatch, "rho must match the operator dimension");
  }
  if (!is_hermitian(rho, tol::hermiticity)) {
    fail(ErrorCode::NotDensityMatrix, "rho is not Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > tol::normalization ||
      std::abs(rho.trace().imag()) > tol::normalization) {
    fail(ErrorCode::NotDensityMatrix, "rho must have unit trace");
  }
  {
    const HermitianEig e = hermitian_eig(rho);
    if (e.eigenvalues.back() < -tol::psd_negative) {
      fail(ErrorCode::NotDensityMatrix, "rho has a negative eigenvalue");
    }
  }

  // Build M_? = sqrt(I - K^dagger K) from the cached SVD so the gauge matches
  // everything else derived from this operator.
  const int n = k.dim();
  const ComplexMatrix& v = k.svd().right_vectors;
  std::vector<double> one_minus_s2(n), root(n);
  for (int i = 0; i < n; ++i) {
    const double s = k.svd().singular_values[i];
    one_minus_s2[i] = std::max(0.0, 1.0 - s * s);
    root[i] = std::sqrt(one_minus_s2[i]);
  }
  ComplexMatrix scaled_e(n, n), scaled_m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      scaled_e(i, j) = v(i, j) * one_minus_s2[j];
      scaled_m(i, j) = v(i, j) * root[j];
    }
  }

  InconclusiveAnalysis a;
  a.e_question = scaled_e * v.adjoint();
  a.m_question = scaled_m * v.adjoint();
  a.rho_question = a.m_question * rho * a.m_question.adjoint();
  a.inconclusive_trace = a.rho_question.trace().real();
  a.rank = 0;
  for (double s : svd(a.rho_question).singular_values) {
    if (s > tol::rho_rank) ++a.rank;
  }
  return a;
}

}  // namespace usdkit
