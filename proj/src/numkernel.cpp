#include "usdkit/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "usdkit/error.hpp"
#include "usdkit/tolerances.hpp"

namespace usdkit {

namespace {

// Rotations below this relative column overlap are skipped; a sweep with no
// rotations means the columns are mutually orthogonal to working precision.
constexpr double kJacobiEps = 1e-13;

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.is_finite()) fail(ErrorCode::NonFinite, std::string(what) + " contains NaN/Inf");
}

// Gauge: rotate column j of both matrices by a common phase so the
// largest-magnitude entry of primary's column becomes real positive.
// Leaves U diag(s) V^dagger invariant.
void fix_column_phase(ComplexMatrix& primary, ComplexMatrix& partner, int j) {
  int arg_max = 0;
  double best = -1.0;
  for (int i = 0; i < primary.rows(); ++i) {
    const double a = std::abs(primary(i, j));
    if (a > best) {
      best = a;
      arg_max = i;
    }
  }
  if (best <= 0.0) return;
  const Complex phase = primary(arg_max, j) / best;
  const Complex rot = std::conj(phase);
  for (int i = 0; i < primary.rows(); ++i) primary(i, j) *= rot;
  if (j < partner.cols()) {
    for (int i = 0; i < partner.rows(); ++i) partner(i, j) *= rot;
  }
}

// Orthonormal completion of the columns of u marked missing, drawn from the
// standard basis by Gram-Schmidt. Deterministic.
void complete_columns(ComplexMatrix& u, const std::vector<bool>& have) {
  const int m = u.rows();
  std::vector<Vector> basis;
  for (int j = 0; j < u.cols(); ++j) {
    if (have[j]) basis.push_back(u.col(j));
  }
  int candidate = 0;
  for (int j = 0; j < u.cols(); ++j) {
    if (have[j]) continue;
    Vector v;
    for (; candidate < m; ++candidate) {
      v = Vector(m, 0.0);
      v[candidate] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (const Vector& b : basis) v = sub(v, scaled(inner(b, v), b));
      }
      if (norm(v) > 0.5) {
        ++candidate;
        break;
      }
    }
    if (norm(v) <= 0.5) fail(ErrorCode::NoConvergence, "orthonormal completion failed");
    v = normalized(v);
    u.set_col(j, v);
    basis.push_back(std::move(v));
  }
}

// Core one-sided Jacobi for rows >= cols. Returns unsorted, ungauged factors.
struct JacobiFactors {
  std::vector<double> s;  // length cols
  ComplexMatrix u;        // rows x rows
  ComplexMatrix v;        // cols x cols
};

JacobiFactors jacobi_svd_tall(const ComplexMatrix& input) {
  const int m = input.rows();
  const int n = input.cols();
  ComplexMatrix a = input;
  ComplexMatrix v = ComplexMatrix::identity(n);

  bool converged = (n <= 1);
  for (int sweep = 0; sweep < tol::max_jacobi_sweeps && !converged; ++sweep) {
    converged = true;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma = 0.0;
        for (int k = 0; k < m; ++k) {
          alpha += std::norm(a(k, p));
          beta += std::norm(a(k, q));
          gamma += std::conj(a(k, p)) * a(k, q);
        }
        if (alpha == 0.0 || beta == 0.0) continue;
        const double abs_g = std::abs(gamma);
        if (abs_g <= kJacobiEps * std::sqrt(alpha * beta)) continue;
        converged = false;

        const Complex phase = gamma / abs_g;
        const double tau = (beta - alpha) / (2.0 * abs_g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Complex s_in = s * std::conj(phase);  // coefficient on column q feeding p
        const Complex s_out = s * phase;            // coefficient on column p feeding q

        for (int k = 0; k < m; ++k) {
          const Complex ap = a(k, p), aq = a(k, q);
          a(k, p) = c * ap - s_in * aq;
          a(k, q) = s_out * ap + c * aq;
        }
        for (int k = 0; k < n; ++k) {
          const Complex vp = v(k, p), vq = v(k, q);
          v(k, p) = c * vp - s_in * vq;
          v(k, q) = s_out * vp + c * vq;
        }
      }
    }
  }
  if (!converged) fail(ErrorCode::NoConvergence, "Jacobi SVD exceeded the sweep cap");

  JacobiFactors out;
  out.s.resize(n);
  out.v = std::move(v);
  out.u = ComplexMatrix(m, m);
  std::vector<bool> have(m, false);
  for (int j = 0; j < n; ++j) {
    Vector cj = a.col(j);
    const double nj = norm(cj);
    out.s[j] = nj;
    if (nj > 0.0) {
      out.u.set_col(j, scaled(1.0 / nj, cj));
      have[j] = true;
    }
  }
  complete_columns(out.u, have);
  return out;
}

}  // namespace

SvdResult svd(const ComplexMatrix& m) {
  require_finite(m, "svd input");
  if (m.rows() == 0 || m.cols() == 0) fail(ErrorCode::DimensionMismatch, "empty matrix");

  const bool flip = m.rows() < m.cols();
  JacobiFactors f = jacobi_svd_tall(flip ? m.adjoint() : m);

  const int k = static_cast<int>(f.s.size());
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return f.s[i] > f.s[j]; });

  SvdResult r;
  r.singular_values.resize(k);
  ComplexMatrix u_sorted(f.u.rows(), f.u.rows());
  ComplexMatrix v_sorted(f.v.rows(), f.v.rows());
  for (int j = 0; j < k; ++j) {
    r.singular_values[j] = f.s[order[j]];
    u_sorted.set_col(j, f.u.col(order[j]));
    v_sorted.set_col(j, f.v.col(order[j]));
  }
  // Columns of u beyond k (rows > cols) keep their completion order.
  for (int j = k; j < f.u.cols(); ++j) u_sorted.set_col(j, f.u.col(j));

  if (flip) {
    r.left_vectors = std::move(v_sorted);
    r.right_vectors = std::move(u_sorted);
  } else {
    r.left_vectors = std::move(u_sorted);
    r.right_vectors = std::move(v_sorted);
  }
  for (int j = 0; j < r.right_vectors.cols(); ++j) {
    fix_column_phase(r.right_vectors, r.left_vectors, j);
  }
  return r;
}

double spectral_norm(const ComplexMatrix& m) { return svd(m).s_max(); }

HermitianEig hermitian_eig(const ComplexMatrix& m) {
  require_finite(m, "hermitian_eig input");
  if (!m.is_square()) fail(ErrorCode::NotHermitian, "matrix is not square");
  if (!is_hermitian(m, tol::hermiticity)) {
    fail(ErrorCode::NotHermitian, "matrix is not Hermitian within tolerance");
  }

  const int n = m.rows();
  // Hermitize to kill representation asymmetry before iterating.
  ComplexMatrix h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));

  ComplexMatrix p = ComplexMatrix::identity(n);
  const double scale = std::max(h.frobenius_norm(), 1e-300);
  const double stop = kJacobiEps * scale;

  bool converged = (n <= 1);
  for (int sweep = 0; sweep < tol::max_jacobi_sweeps && !converged; ++sweep) {
    converged = true;
    for (int pi = 0; pi < n - 1; ++pi) {
      for (int qi = pi + 1; qi < n; ++qi) {
        const Complex hpq = h(pi, qi);
        const double abs_g = std::abs(hpq);
        if (abs_g <= stop) continue;
        converged = false;

        const Complex phase = hpq / abs_g;
        const double tau = (h(qi, qi).real() - h(pi, pi).real()) / (2.0 * abs_g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Complex s_in = s * std::conj(phase);
        const Complex s_out = s * phase;

        // h <- J^dagger h J with J acting on columns (pi, qi).
        for (int k = 0; k < n; ++k) {
          const Complex hp = h(k, pi), hq = h(k, qi);
          h(k, pi) = c * hp - s_in * hq;
          h(k, qi) = s_out * hp + c * hq;
        }
        for (int k = 0; k < n; ++k) {
          const Complex hp = h(pi, k), hq = h(qi, k);
          h(pi, k) = c * hp - std::conj(s_in) * hq;
          h(qi, k) = std::conj(s_out) * hp + c * hq;
        }
        for (int k = 0; k < n; ++k) {
          const Complex pp = p(k, pi), pq = p(k, qi);
          p(k, pi) = c * pp - s_in * pq;
          p(k, qi) = s_out * pp + c * pq;
        }
      }
    }
  }
  if (!converged) fail(ErrorCode::NoConvergence, "Jacobi eigensolver exceeded the sweep cap");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return h(i, i).real() > h(j, j).real(); });

  HermitianEig r;
  r.eigenvalues.resize(n);
  r.eigenvectors = ComplexMatrix(n, n);
  for (int j = 0; j < n; ++j) {
    r.eigenvalues[j] = h(order[j], order[j]).real();
    r.eigenvectors.set_col(j, p.col(order[j]));
  }
  ComplexMatrix dummy(0, 0);
  for (int j = 0; j < n; ++j) fix_column_phase(r.eigenvectors, dummy, j);
  return r;
}

ComplexMatrix inverse(const ComplexMatrix& m) {
  if (!m.is_square()) fail(ErrorCode::DimensionMismatch, "inverse of a non-square matrix");
  const SvdResult f = svd(m);
  if (f.s_min() <= tol::singularity_rel * f.s_max()) {
    fail(ErrorCode::Singular, "smallest singular value below the singularity threshold");
  }
  // m^-1 = V diag(1/s) U^dagger
  const int n = m.rows();
  ComplexMatrix vs(n, n);
  for (int j = 0; j < n; ++j) {
    const double inv_s = 1.0 / f.singular_values[j];
    for (int i = 0; i < n; ++i) vs(i, j) = f.right_vectors(i, j) * inv_s;
  }
  return vs * f.left_vectors.adjoint();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  HermitianEig e = hermitian_eig(m);
  std::vector<double> roots(e.eigenvalues.size());
  for (size_t i = 0; i < e.eigenvalues.size(); ++i) {
    double lambda = e.eigenvalues[i];
    if (lambda < -tol::psd_negative) {
      fail(ErrorCode::NegativeEigenvalue, "matrix has an eigenvalue below -1e-8");
    }
    roots[i] = std::sqrt(std::max(lambda, 0.0));
  }
  ComplexMatrix scaled_vecs(e.eigenvectors.rows(), e.eigenvectors.cols());
  for (int j = 0; j < e.eigenvectors.cols(); ++j)
    for (int i = 0; i < e.eigenvectors.rows(); ++i)
      scaled_vecs(i, j) = e.eigenvectors(i, j) * roots[j];
  ComplexMatrix root = scaled_vecs * e.eigenvectors.adjoint();
  // Exact hermiticity of the result.
  for (int i = 0; i < root.rows(); ++i) {
    root(i, i) = root(i, i).real();
    for (int j = i + 1; j < root.cols(); ++j) {
      const Complex avg = 0.5 * (root(i, j) + std::conj(root(j, i)));
      root(i, j) = avg;
      root(j, i) = std::conj(avg);
    }
  }
  return root;
}

ComplexMatrix gram(const ComplexMatrix& states) {
  const int m = states.cols();
  ComplexMatrix g(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      Complex sum = 0.0;
      for (int k = 0; k < states.rows(); ++k) sum += std::conj(states(k, i)) * states(k, j);
      g(i, j) = sum;
      if (i != j) g(j, i) = std::conj(sum);
    }
  }
  return g;
}

}  // namespace usdkit
