#include "grfb/cxmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "grfb/error.hpp"

namespace grfb {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_)
    throw ValidationError("matrix entry count " + std::to_string(entries_.size()) +
                          " does not match shape " + std::to_string(rows_) + "x" +
                          std::to_string(cols_));
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ValidationError("ragged matrix literal");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) { return eye(n, n); }

ComplexMatrix ComplexMatrix::eye(std::size_t rows, std::size_t cols) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < std::min(rows, cols); ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::column_vector(std::span<const cplx> v) {
  return ComplexMatrix(v.size(), 1, std::vector<cplx>(v.begin(), v.end()));
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = std::conj((*this)(r, c));
  return t;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

ComplexMatrix ComplexMatrix::leading_columns(std::size_t k) const {
  if (k > cols_) throw ValidationError("requested more columns than the matrix has");
  ComplexMatrix out(rows_, k);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < k; ++c) out(r, c) = (*this)(r, c);
  return out;
}

std::vector<cplx> ComplexMatrix::column(std::size_t c) const {
  std::vector<cplx> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& x : entries_) s += std::norm(x);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& x : entries_) m = std::max(m, std::abs(x));
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const cplx& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ValidationError("shape mismatch in +");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ValidationError("shape mismatch in -");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& x : entries_) x *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("shape mismatch in *");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx x = a(r, k);
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += x * b(k, c);
    }
  return out;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

std::vector<cplx> operator*(const ComplexMatrix& a, std::span<const cplx> x) {
  if (a.cols() != x.size()) throw ValidationError("shape mismatch in matrix-vector product");
  std::vector<cplx> y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) y[r] += a(r, c) * x[c];
  return y;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

double gram_residual(const ComplexMatrix& a) {
  return max_abs_diff(a.adjoint() * a, ComplexMatrix::identity(a.cols()));
}

std::vector<cplx> solve(const ComplexMatrix& a, std::span<const cplx> b, double pivot_tol) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw ValidationError("solve expects a square system");
  ComplexMatrix m = a;
  std::vector<cplx> x(b.begin(), b.end());
  const double scale = std::max(a.max_abs(), 1e-300);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) <= pivot_tol * scale)
      throw NumericalError("singular system in solve (pivot " +
                           std::to_string(std::abs(m(piv, col))) + ")");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(col, c), m(piv, c));
      std::swap(x[col], x[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const cplx f = m(r, col) / m(col, col);
      if (f == cplx{}) continue;
      for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(col, c);
      x[r] -= f * x[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    cplx s = x[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= m(i, c) * x[c];
    x[i] = s / m(i, i);
  }
  return x;
}

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kJacobiTol = 1e-15;

// Fills columns of `u` flagged in `missing` with unit vectors orthogonal to
// every other column.
void complete_basis(ComplexMatrix& u, const std::vector<bool>& missing) {
  const std::size_t m = u.rows();
  for (std::size_t k = 0; k < u.cols(); ++k) {
    if (!missing[k]) continue;
    std::vector<cplx> best;
    double best_norm = -1.0;
    for (std::size_t e = 0; e < m; ++e) {
      std::vector<cplx> x(m);
      x[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < u.cols(); ++j) {
          if (j == k || (missing[j] && j > k)) continue;
          cplx proj{};
          for (std::size_t r = 0; r < m; ++r) proj += std::conj(u(r, j)) * x[r];
          for (std::size_t r = 0; r < m; ++r) x[r] -= proj * u(r, j);
        }
      }
      double nrm = 0.0;
      for (const auto& xi : x) nrm += std::norm(xi);
      if (nrm > best_norm) {
        best_norm = nrm;
        best = std::move(x);
      }
    }
    const double s = std::sqrt(best_norm);
    for (std::size_t r = 0; r < m; ++r) u(r, k) = best[r] / s;
  }
}

}  // namespace

SvdResult svd(const ComplexMatrix& a) {
  if (a.rows() < 1 || a.rows() > 4 || a.cols() < 1 || a.cols() > 4)
    throw ConfigError("svd supports 1..4 rows and columns, got " + std::to_string(a.rows()) +
                      "x" + std::to_string(a.cols()));
  if (!a.all_finite()) throw ValidationError("svd input has non-finite entries");

  if (a.rows() < a.cols()) {
    SvdResult t = svd(a.adjoint());
    return {std::move(t.v), std::move(t.d), std::move(t.u)};
  }

  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  ComplexMatrix w = a;
  ComplexMatrix v = ComplexMatrix::identity(n);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        cplx gamma{};
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(w(i, p));
          beta += std::norm(w(i, q));
          gamma += std::conj(w(i, p)) * w(i, q);
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= kJacobiTol * std::sqrt(alpha * beta)) continue;
        rotated = true;

        // Rotate column q by the conjugate phase of gamma; the pair is then a
        // real 2x2 Jacobi problem.
        const cplx unphase = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const cplx wp = w(i, p);
          const cplx wq = unphase * w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const cplx vp = v(i, p);
          const cplx vq = unphase * v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::norm(w(i, k));
    sigma[k] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double smax = sigma[order[0]];
  const double zero_tol = std::max(smax, 1e-300) * 1e-13;
  SvdResult out{ComplexMatrix(m, n), std::vector<double>(n), ComplexMatrix(n, n)};
  std::vector<bool> missing(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.d[k] = sigma[src];
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, src);
    if (sigma[src] <= zero_tol) {
      missing[k] = true;
      continue;
    }
    for (std::size_t i = 0; i < m; ++i) out.u(i, k) = w(i, src) / sigma[src];
  }
  if (std::any_of(missing.begin(), missing.end(), [](bool b) { return b; }))
    complete_basis(out.u, missing);
  return out;
}

PhaseNormalized phase_normalize(const ComplexMatrix& v) {
  if (v.rows() < 1) throw ValidationError("phase_normalize needs at least one row");
  const std::size_t last = v.rows() - 1;
  std::vector<cplx> phases(v.cols(), cplx{1.0, 0.0});
  for (std::size_t k = 0; k < v.cols(); ++k) {
    const double mag = std::abs(v(last, k));
    if (mag >= 1e-15) phases[k] = std::conj(v(last, k)) / mag;
  }
  PhaseNormalized out{v, ComplexMatrix::diagonal(phases)};
  for (std::size_t r = 0; r < v.rows(); ++r)
    for (std::size_t k = 0; k < v.cols(); ++k) out.v_bar(r, k) *= phases[k];
  for (std::size_t k = 0; k < v.cols(); ++k) out.v_bar(last, k) = std::abs(v(last, k));
  return out;
}

}  // namespace grfb
