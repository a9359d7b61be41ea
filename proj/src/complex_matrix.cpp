#include "usdkit/complex_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "usdkit/error.hpp"

namespace usdkit {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::DimensionMismatch, "matrix shapes differ");
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {
  if (rows < 0 || cols < 0) fail(ErrorCode::DimensionMismatch, "negative dimension");
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows < 0 || cols < 0 || data_.size() != static_cast<size_t>(rows) * cols) {
    fail(ErrorCode::DimensionMismatch, "entry count does not match rows x cols");
  }
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zero(int rows, int cols) { return ComplexMatrix(rows, cols); }

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& d) {
  ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const Vector& d) {
  ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_columns(const std::vector<Vector>& cols) {
  if (cols.empty()) return {};
  const int rows = static_cast<int>(cols.front().size());
  ComplexMatrix m(rows, static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    if (static_cast<int>(cols[j].size()) != rows) {
      fail(ErrorCode::DimensionMismatch, "ragged column list");
    }
    for (int i = 0; i < rows; ++i) m(i, static_cast<int>(j)) = cols[j][i];
  }
  return m;
}

ComplexMatrix ComplexMatrix::column(const Vector& v) { return from_columns({v}); }

bool ComplexMatrix::is_finite() const {
  for (const Complex& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double ComplexMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (const Complex& z : data_) sum += std::norm(z);
  return std::sqrt(sum);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const Complex& z : data_) m = std::max(m, std::abs(z));
  return m;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  const int n = std::min(rows_, cols_);
  for (int i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = std::conj((*this)(i, j));
  return m;
}

Vector ComplexMatrix::col(int j) const {
  Vector v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void ComplexMatrix::set_col(int j, const Vector& v) {
  if (static_cast<int>(v.size()) != rows_) fail(ErrorCode::DimensionMismatch, "column length");
  for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Vector ComplexMatrix::row_vec(int i) const {
  Vector v(cols_);
  for (int j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) fail(ErrorCode::DimensionMismatch, "matrix product shapes");
  ComplexMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b);
  ComplexMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b);
  ComplexMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

ComplexMatrix operator*(double s, const ComplexMatrix& a) { return Complex(s, 0.0) * a; }

Vector operator*(const ComplexMatrix& a, const Vector& v) {
  if (a.cols() != static_cast<int>(v.size())) {
    fail(ErrorCode::DimensionMismatch, "matrix-vector product shapes");
  }
  Vector out(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    Complex sum = 0.0;
    for (int j = 0; j < a.cols(); ++j) sum += a(i, j) * v[j];
    out[i] = sum;
  }
  return out;
}

Complex inner(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "inner product lengths");
  Complex sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

double norm(const Vector& v) {
  double sum = 0.0;
  for (const Complex& z : v) sum += std::norm(z);
  return std::sqrt(sum);
}

Vector normalized(const Vector& v) {
  const double n = norm(v);
  if (n <= 0.0) fail(ErrorCode::ZeroState, "cannot normalize a zero vector");
  Vector out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

Vector scaled(Complex s, const Vector& v) {
  Vector out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

Vector add(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "vector sum lengths");
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector sub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "vector difference lengths");
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double normalized_offdiag_max(const ComplexMatrix& gram) {
  double worst = 0.0;
  for (int i = 0; i < gram.rows(); ++i) {
    for (int j = 0; j < gram.cols(); ++j) {
      if (i == j) continue;
      const double scale = std::sqrt(std::abs(gram(i, i).real()) * std::abs(gram(j, j).real()));
      if (scale <= 0.0) continue;
      worst = std::max(worst, std::abs(gram(i, j)) / scale);
    }
  }
  return worst;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (!m.is_square()) return false;
  const ComplexMatrix prod = m.adjoint() * m;
  return max_abs_diff(prod, ComplexMatrix::identity(m.rows())) <= tol;
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (!m.is_square()) return false;
  const double scale = std::max(m.max_abs(), 1e-300);
  return max_abs_diff(m, m.adjoint()) <= rel_tol * scale;
}

}  // namespace usdkit
