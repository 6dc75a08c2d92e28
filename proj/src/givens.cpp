#include "grfb/givens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "grfb/error.hpp"

namespace grfb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w >= kTwoPi ? 0.0 : w;
}

double clamp_psi(double psi) { return std::clamp(psi, 0.0, kHalfPi); }

}  // namespace

void GrDims::validate() const {
  if (n_t < 1 || n_t > 4)
    throw ConfigError("n_t must be in 1..4, got " + std::to_string(n_t));
  if (k < 1 || k > n_t)
    throw ConfigError("k must be in 1..n_t, got " + std::to_string(k) + " for n_t = " +
                      std::to_string(n_t));
}

int GrDims::column_groups() const { return std::min(n_t - 1, k); }

std::size_t GrDims::phi_count() const {
  std::size_t n = 0;
  for (int c = 0; c < column_groups(); ++c) n += static_cast<std::size_t>(n_t - 1 - c);
  return n;
}

std::size_t GrDims::psi_count() const { return phi_count(); }

std::string GrDims::label() const { return std::to_string(n_t) + "x" + std::to_string(k); }

GrDims GrDims::parse(const std::string& text) {
  const auto x = text.find_first_of("xX");
  GrDims d;
  try {
    if (x == std::string::npos) throw std::invalid_argument("missing x");
    std::size_t used = 0;
    d.n_t = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("trailing characters");
    d.k = std::stoi(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::logic_error&) {
    throw ConfigError("dimensions must look like NxK, got '" + text + "'");
  }
  d.validate();
  return d;
}

std::string AngleSlot::name() const {
  return (kind == AngleKind::phi ? "phi" : "psi") + std::to_string(l) + std::to_string(i);
}

std::vector<AngleSlot> canonical_slots(const GrDims& dims) {
  dims.validate();
  std::vector<AngleSlot> out;
  for (int i = 1; i <= dims.column_groups(); ++i) {
    for (int l = i; l <= dims.n_t - 1; ++l) out.push_back({AngleKind::phi, l, i});
    for (int l = i + 1; l <= dims.n_t; ++l) out.push_back({AngleKind::psi, l, i});
  }
  return out;
}

std::vector<double> GivensParams::flat() const {
  std::vector<double> out;
  for (const auto& c : columns) {
    out.insert(out.end(), c.phis.begin(), c.phis.end());
    out.insert(out.end(), c.psis.begin(), c.psis.end());
  }
  return out;
}

std::vector<double> GivensParams::phis() const {
  std::vector<double> out;
  for (const auto& c : columns) out.insert(out.end(), c.phis.begin(), c.phis.end());
  return out;
}

std::vector<double> GivensParams::psis() const {
  std::vector<double> out;
  for (const auto& c : columns) out.insert(out.end(), c.psis.begin(), c.psis.end());
  return out;
}

GivensParams GivensParams::from_flat(const GrDims& dims, const std::vector<double>& angles) {
  dims.validate();
  if (angles.size() != dims.parameter_count())
    throw ValidationError(dims.label() + " needs " + std::to_string(dims.parameter_count()) +
                          " angles, got " + std::to_string(angles.size()));
  GivensParams p{dims, {}};
  std::size_t pos = 0;
  for (int c = 0; c < dims.column_groups(); ++c) {
    const auto n = static_cast<std::size_t>(dims.n_t - 1 - c);
    GrColumn col;
    col.phis.assign(angles.begin() + pos, angles.begin() + pos + n);
    pos += n;
    col.psis.assign(angles.begin() + pos, angles.begin() + pos + n);
    pos += n;
    p.columns.push_back(std::move(col));
  }
  return p;
}

GivensParams GivensParams::from_split(const GrDims& dims, const std::vector<double>& phis,
                                      const std::vector<double>& psis) {
  dims.validate();
  if (phis.size() != dims.phi_count() || psis.size() != dims.psi_count())
    throw ValidationError("angle counts do not match " + dims.label());
  GivensParams p{dims, {}};
  std::size_t pos = 0;
  for (int c = 0; c < dims.column_groups(); ++c) {
    const auto n = static_cast<std::size_t>(dims.n_t - 1 - c);
    GrColumn col;
    col.phis.assign(phis.begin() + pos, phis.begin() + pos + n);
    col.psis.assign(psis.begin() + pos, psis.begin() + pos + n);
    pos += n;
    p.columns.push_back(std::move(col));
  }
  return p;
}

ComplexMatrix givens_block(int l, int i, double psi, int n) {
  if (!(1 <= i && i < l && l <= n))
    throw ValidationError("givens_block needs 1 <= i < l <= n, got l=" + std::to_string(l) +
                          " i=" + std::to_string(i) + " n=" + std::to_string(n));
  ComplexMatrix g = ComplexMatrix::identity(static_cast<std::size_t>(n));
  const auto a = static_cast<std::size_t>(i - 1);
  const auto b = static_cast<std::size_t>(l - 1);
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  g(a, a) = c;
  g(b, b) = c;
  g(a, b) = s;
  g(b, a) = -s;
  return g;
}

GivensParams gr_decompose(const ComplexMatrix& w, const GrDims& dims) {
  dims.validate();
  const auto n = static_cast<std::size_t>(dims.n_t);
  if (w.rows() != n || w.cols() != static_cast<std::size_t>(dims.k))
    throw ValidationError("expected a " + dims.label() + " matrix, got " +
                          std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
  if (!w.all_finite()) throw ValidationError("matrix has non-finite entries");
  if (const double r = gram_residual(w); r > 1e-9)
    throw ValidationError("columns are not orthonormal (Gram residual " + std::to_string(r) + ")");
  for (std::size_t c = 0; c < w.cols(); ++c) {
    const cplx x = w(n - 1, c);
    if (std::abs(x.imag()) > 1e-9 || x.real() < -1e-9)
      throw ValidationError("last row must be real and nonnegative; phase-normalize first");
  }

  ComplexMatrix x = w;
  GivensParams p{dims, {}};
  for (std::size_t c = 0; c < static_cast<std::size_t>(dims.column_groups()); ++c) {
    GrColumn col;
    for (std::size_t r = c; r + 1 < n; ++r) {
      const cplx e = x(r, c);
      const double phi = std::abs(e) < 1e-15 ? 0.0 : wrap_phase(std::arg(e));
      col.phis.push_back(phi);
      const cplx rot = std::polar(1.0, -phi);
      for (std::size_t k = c; k < x.cols(); ++k) x(r, k) *= rot;
    }
    for (std::size_t l = c + 1; l < n; ++l) {
      const double a = x(c, c).real();
      const double b = x(l, c).real();
      const double psi = clamp_psi(std::atan2(b, a));
      col.psis.push_back(psi);
      const double cs = std::cos(psi);
      const double sn = std::sin(psi);
      for (std::size_t k = c; k < x.cols(); ++k) {
        const cplx rc = x(c, k);
        const cplx rl = x(l, k);
        x(c, k) = cs * rc + sn * rl;
        x(l, k) = -sn * rc + cs * rl;
      }
    }
    p.columns.push_back(std::move(col));
  }
  return p;
}

ComplexMatrix gr_reconstruct(const GivensParams& p) {
  p.dims.validate();
  const auto n = static_cast<std::size_t>(p.dims.n_t);
  const auto k = static_cast<std::size_t>(p.dims.k);
  if (p.columns.size() != static_cast<std::size_t>(p.dims.column_groups()))
    throw ValidationError("parameter column groups do not match " + p.dims.label());

  ComplexMatrix x = ComplexMatrix::eye(n, k);
  for (std::size_t c = p.columns.size(); c-- > 0;) {
    const GrColumn& col = p.columns[c];
    if (col.phis.size() != n - 1 - c || col.psis.size() != n - 1 - c)
      throw ValidationError("malformed angle group " + std::to_string(c + 1));
    for (std::size_t l = n; l-- > c + 1;) {
      const double psi = clamp_psi(col.psis[l - c - 1]);
      const double cs = std::cos(psi);
      const double sn = std::sin(psi);
      for (std::size_t j = 0; j < k; ++j) {
        const cplx rc = x(c, j);
        const cplx rl = x(l, j);
        x(c, j) = cs * rc - sn * rl;
        x(l, j) = sn * rc + cs * rl;
      }
    }
    for (std::size_t r = c; r + 1 < n; ++r) {
      const cplx rot = std::polar(1.0, wrap_phase(col.phis[r - c]));
      for (std::size_t j = 0; j < k; ++j) x(r, j) *= rot;
    }
  }
  return x;
}

ComplexMatrix gr_reconstruct_dense(const GivensParams& p) {
  p.dims.validate();
  const int n = p.dims.n_t;
  ComplexMatrix acc = ComplexMatrix::identity(static_cast<std::size_t>(n));
  for (int i = 1; i <= p.dims.column_groups(); ++i) {
    const GrColumn& col = p.columns.at(static_cast<std::size_t>(i - 1));
    std::vector<cplx> diag(static_cast<std::size_t>(n), 1.0);
    for (int l = i; l <= n - 1; ++l)
      diag[static_cast<std::size_t>(l - 1)] =
          std::polar(1.0, wrap_phase(col.phis.at(static_cast<std::size_t>(l - i))));
    acc = acc * ComplexMatrix::diagonal(diag);
    for (int l = i + 1; l <= n; ++l)
      acc = acc * givens_block(l, i, clamp_psi(col.psis.at(static_cast<std::size_t>(l - i - 1))), n)
                      .transpose();
  }
  return acc * ComplexMatrix::eye(static_cast<std::size_t>(n), static_cast<std::size_t>(p.dims.k));
}

}  // namespace grfb
