#include "usdkit/usd.hpp"

#include <algorithm>
#include <cmath>

#include "usdkit/error.hpp"
#include "usdkit/numkernel.hpp"

namespace usdkit {

namespace {

double clamp_cos(double c) { return std::min(1.0, std::max(-1.0, c)); }

void require_discriminated(const LossyOperator& k, const StateSet& states, double ortho_tol) {
  const ComplexMatrix out_gram = gram(k.matrix() * states.states());
  if (normalized_offdiag_max(out_gram) > ortho_tol) {
    fail(ErrorCode::NotDiscriminated, "K does not map the set to orthogonal outputs");
  }
}

}  // namespace

AnalysisReport analyze(const LossyOperator& k) {
  AnalysisReport r;
  r.singular_values = k.svd().singular_values;
  r.spectral_norm = k.s_max();
  r.passive = k.passive();
  r.discriminating = k.invertible();
  if (!k.invertible()) return r;

  const double x = k.s_min() / k.s_max();
  r.best_angle_rad = 2.0 * std::atan(x);
  r.angle_lower_bound = 1.5 * x;
  r.angle_upper_bound = 2.0 * x;
  r.condition_product = k.s_max() / k.s_min();
  return r;
}

double best_angle(const LossyOperator& k) {
  if (!k.invertible()) fail(ErrorCode::NonInvertible, "operator has a (numerically) zero singular value");
  return 2.0 * std::atan2(k.s_min(), k.s_max());
}

OptimalPair optimal_pair(const LossyOperator& k) {
  if (!k.invertible()) fail(ErrorCode::NonInvertible, "operator has a (numerically) zero singular value");

  const SvdResult& f = k.svd();
  const int n = k.dim();
  const Vector v_max = f.right_vectors.col(0);
  const Vector v_min = f.right_vectors.col(n - 1);

  OptimalPair p;
  p.degenerate_optimum = (f.s_max() - f.s_min()) <= tol::degeneracy_rel * f.s_max();
  if (p.degenerate_optimum) {
    // All singular values coincide; any orthogonal pair is optimal.
    p.g_plus = v_max;
    p.g_minus = v_min;
  } else {
    p.g_plus = add(scaled(f.s_min(), v_max), scaled(f.s_max(), v_min));
    p.g_minus = sub(scaled(f.s_min(), v_max), scaled(f.s_max(), v_min));
  }
  p.out_plus = k.matrix() * p.g_plus;
  p.out_minus = k.matrix() * p.g_minus;
  p.angle_rad = p.degenerate_optimum ? std::acos(0.0) : 2.0 * std::atan2(f.s_min(), f.s_max());
  const double overlap = std::abs(inner(normalized(p.g_plus), normalized(p.g_minus)));
  p.detection_probability = 1.0 - overlap;
  return p;
}

LossyOperator synthesize_discriminator(const StateSet& states,
                                       std::optional<std::vector<double>> weights,
                                       std::optional<ComplexMatrix> output_basis) {
  const int n = states.dim();
  const int m = states.count();

  const SvdResult gf = svd(states.states());
  if (gf.s_min() <= tol::singularity_rel * gf.s_max()) {
    fail(ErrorCode::LinearlyDependent, "input states are linearly dependent; USD impossible");
  }

  if (weights) {
    if (static_cast<int>(weights->size()) != m) {
      fail(ErrorCode::LengthMismatch, "one weight per state required");
    }
    for (double w : *weights) {
      if (!(w > 0.0 && w <= 1.0)) fail(ErrorCode::NotNormalized, "weights must lie in (0, 1]");
    }
  }
  ComplexMatrix u_out = output_basis.value_or(ComplexMatrix::identity(n));
  if (u_out.rows() != n || u_out.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "output basis must be N x N");
  }
  if (!is_unitary(u_out, 1e-9)) fail(ErrorCode::NotUnitary, "output basis is not unitary");

  // Complete to a square matrix when there are fewer states than dimensions;
  // the spare left singular vectors span the orthogonal complement.
  ComplexMatrix g_full(n, n);
  for (int j = 0; j < m; ++j) g_full.set_col(j, states.states().col(j));
  for (int j = m; j < n; ++j) g_full.set_col(j, gf.left_vectors.col(j));

  const ComplexMatrix g_inv = inverse(g_full);

  ComplexMatrix lambda_g_inv(n, n);
  for (int i = 0; i < n; ++i) {
    const double w = (weights && i < m) ? (*weights)[i] : 1.0;
    for (int j = 0; j < n; ++j) lambda_g_inv(i, j) = w * g_inv(i, j);
  }

  if (!weights) {
    // Uniform weights Lambda = I / ||G^-1||: s_max becomes exactly 1.
    const double inv_norm = spectral_norm(g_inv);
    lambda_g_inv = (1.0 / inv_norm) * lambda_g_inv;
  } else {
    const double nrm = spectral_norm(lambda_g_inv);
    if (nrm > 1.0 + tol::passivity_slack) {
      // Requested weights are infeasible for a passive K; preserve their
      // ratios and scale the whole map down to the passive boundary.
      lambda_g_inv = (1.0 / nrm) * lambda_g_inv;
    }
  }
  return LossyOperator(u_out * lambda_g_inv);
}

bool are_usd_equivalent(const LossyOperator& a, const LossyOperator& b, double tol) {
  if (a.dim() != b.dim()) fail(ErrorCode::DimensionMismatch, "operators act on different dimensions");
  const double scale = std::max({a.s_max(), b.s_max(), 1e-300});
  for (int i = 0; i < a.dim(); ++i) {
    if (std::abs(a.svd().singular_values[i] - b.svd().singular_values[i]) > tol * scale) {
      return false;
    }
  }
  return true;
}

PopulationReport population_report(const LossyOperator& k, const StateSet& states,
                                   double ortho_tol) {
  require_discriminated(k, states, ortho_tol);

  const int n = k.dim();
  const int m = states.count();
  PopulationReport r;
  r.overlaps.assign(m, std::vector<double>(n, 0.0));
  r.fully_populated = true;
  for (int s = 0; s < m; ++s) {
    const Vector g_hat = normalized(states.state(s));
    for (int i = 0; i < n; ++i) {
      const double o = std::abs(inner(g_hat, k.svd().right_vectors.col(i)));
      r.overlaps[s][i] = o;
      if (o <= tol::population) r.fully_populated = false;
    }
  }

  if (m >= 2) {
    const ComplexMatrix in_gram = gram(states.states());
    r.completely_non_orthogonal = true;
    for (int i = 0; i < m && r.completely_non_orthogonal; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double scale = std::sqrt(in_gram(i, i).real() * in_gram(j, j).real());
        if (std::abs(in_gram(i, j)) <= tol::population * scale) {
          r.completely_non_orthogonal = false;
          break;
        }
      }
    }
    r.min_pairwise_angle_rad = min_pairwise_angle(states);
  }
  return r;
}

double min_pairwise_angle(const StateSet& states) {
  if (states.count() < 2) fail(ErrorCode::DimensionMismatch, "need at least two states");
  std::vector<Vector> hats;
  hats.reserve(states.count());
  for (int i = 0; i < states.count(); ++i) hats.push_back(normalized(states.state(i)));
  double min_angle = std::acos(0.0) * 2.0;  // pi
  for (size_t i = 0; i < hats.size(); ++i) {
    for (size_t j = i + 1; j < hats.size(); ++j) {
      const double c = clamp_cos(std::abs(inner(hats[i], hats[j])));
      min_angle = std::min(min_angle, std::acos(c));
    }
  }
  return min_angle;
}

namespace internal {

TwoStateReduction reduce_to_2d(const LossyOperator& k, const Vector& g1, const Vector& g2,
                               double ortho_tol) {
  const Vector a = normalized(g1);
  Vector b = normalized(g2);

  // Rotate the global phase of g2 so the mutual overlap is real positive.
  const Complex c0 = inner(b, a);
  if (std::abs(c0) > 0.0) b = scaled(c0 / std::abs(c0), b);
  const double c = std::abs(c0);
  if (c >= 1.0 - 1e-14) fail(ErrorCode::LinearlyDependent, "pair is parallel");

  const Vector plus = normalized(add(a, b));
  const Vector minus = normalized(sub(a, b));

  TwoStateReduction r;
  double residual = 0.0;
  const Complex xa = inner(plus, a), ya = inner(minus, a);
  const Complex xb = inner(plus, b), yb = inner(minus, b);
  r.x_in = xa.real();
  r.y_in = ya.real();
  residual = std::max({residual, std::abs(xa.imag()), std::abs(ya.imag()),
                       std::abs(xb.imag()), std::abs(yb.imag())});
  residual = std::max({residual, std::abs(xb.real() - r.x_in), std::abs(yb.real() + r.y_in)});
  // Off-plane leakage of the inputs.
  Vector rec = add(scaled(xa, plus), scaled(ya, minus));
  residual = std::max(residual, norm(sub(a, rec)));

  const Vector h1 = k.matrix() * a;
  const Vector h2 = k.matrix() * b;
  const double n1 = norm(h1), n2 = norm(h2);
  if (n1 <= 0.0 || n2 <= 0.0) fail(ErrorCode::ZeroState, "K annihilates one of the states");
  if (std::abs(inner(h2, h1)) > ortho_tol * n1 * n2) {
    fail(ErrorCode::NotDiscriminated, "pair outputs are not orthogonal");
  }

  const Vector plus_out = normalized(add(scaled(1.0 / n1, h1), scaled(1.0 / n2, h2)));
  const Vector minus_out = normalized(sub(scaled(1.0 / n1, h1), scaled(1.0 / n2, h2)));
  const Complex xo1 = inner(plus_out, h1), yo1 = inner(minus_out, h1);
  const Complex xo2 = inner(plus_out, h2), yo2 = inner(minus_out, h2);
  r.x_out = xo1.real();
  r.y_out = yo1.real();
  r.x_out2 = xo2.real();
  r.y_out2 = -yo2.real();
  residual = std::max({residual, std::abs(xo1.imag()), std::abs(yo1.imag()),
                       std::abs(xo2.imag()), std::abs(yo2.imag())});
  rec = add(scaled(xo1, plus_out), scaled(yo1, minus_out));
  residual = std::max(residual, norm(sub(h1, rec)));

  r.angle_rad = 2.0 * std::atan2(r.y_in, r.x_in);
  r.residual = residual;
  return r;
}

}  // namespace internal

}  // namespace usdkit
