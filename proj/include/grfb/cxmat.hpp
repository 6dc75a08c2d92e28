#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace grfb {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Sized for the beamforming problems handled
/// here (at most 4x4), so every operation allocates freely and returns by value.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  /// First `cols` columns of the n x n identity.
  static ComplexMatrix eye(std::size_t rows, std::size_t cols);
  static ComplexMatrix diagonal(std::span<const cplx> d);
  static ComplexMatrix column_vector(std::span<const cplx> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const cplx> entries() const { return entries_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix leading_columns(std::size_t k) const;
  std::vector<cplx> column(std::size_t c) const;

  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> entries_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, cplx s);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
std::vector<cplx> operator*(const ComplexMatrix& a, std::span<const cplx> x);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// max |(A^H A - I)_{ij}|: how far the columns of `a` are from orthonormal.
double gram_residual(const ComplexMatrix& a);

/// Solves a x = b for square `a` by Gaussian elimination with partial
/// pivoting. Throws NumericalError when a pivot falls below `pivot_tol`.
std::vector<cplx> solve(const ComplexMatrix& a, std::span<const cplx> b,
                        double pivot_tol = 1e-300);

struct SvdResult {
  ComplexMatrix u;        // rows x R, orthonormal columns
  std::vector<double> d;  // R singular values, descending, >= 0
  ComplexMatrix v;        // cols x R, orthonormal columns
};

/// Thin SVD, R = min(rows, cols), computed by one-sided (Hestenes) Jacobi.
/// Zero singular values are kept; the matching columns of u are completed to
/// an orthonormal set. Equal singular values keep their original column order.
SvdResult svd(const ComplexMatrix& a);

struct PhaseNormalized {
  ComplexMatrix v_bar;
  ComplexMatrix sigma;  // diagonal, unit modulus
};

/// Right-multiplies `v` by a diagonal phase matrix so its last row becomes
/// real and nonnegative. Columns whose last entry has magnitude below 1e-15
/// keep phase factor 1.
PhaseNormalized phase_normalize(const ComplexMatrix& v);

}  // namespace grfb
