#pragma once

#include <complex>
#include <vector>

namespace usdkit {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

/// Dense complex matrix, row-major. The universal carrier for operators,
/// state-set columns, bipartite coefficient matrices and density matrices.
/// Entries are mutable; finiteness is validated at the operations that
/// consume the matrix, not at construction.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols);
  ComplexMatrix(int rows, int cols, std::vector<Complex> entries);

  static ComplexMatrix identity(int n);
  static ComplexMatrix zero(int rows, int cols);
  static ComplexMatrix diagonal(const std::vector<double>& d);
  static ComplexMatrix diagonal(const Vector& d);
  static ComplexMatrix from_columns(const std::vector<Vector>& cols);
  static ComplexMatrix column(const Vector& v);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const Complex& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  const std::vector<Complex>& data() const noexcept { return data_; }

  bool is_finite() const;
  double frobenius_norm() const;
  double max_abs() const;
  Complex trace() const;

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  Vector col(int j) const;
  void set_col(int j, const Vector& v);
  Vector row_vec(int i) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, const ComplexMatrix& a);
ComplexMatrix operator*(double s, const ComplexMatrix& a);
Vector operator*(const ComplexMatrix& a, const Vector& v);

/// <a|b>, conjugate-linear in the first argument.
Complex inner(const Vector& a, const Vector& b);
double norm(const Vector& v);
Vector normalized(const Vector& v);
Vector scaled(Complex s, const Vector& v);
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest |off-diagonal| of gram normalized by sqrt of the corresponding
/// diagonal entries; 0 for matrices with fewer than two columns. Used by
/// every "is this set discriminated" check.
double normalized_offdiag_max(const ComplexMatrix& gram);

bool is_unitary(const ComplexMatrix& m, double tol = 1e-9);
bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-10);

}  // namespace usdkit
