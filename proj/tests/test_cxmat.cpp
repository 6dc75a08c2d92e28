#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "grfb/error.hpp"
#include "test_util.hpp"

using namespace grfb;
using testutil::det_cofactor;

namespace {

ComplexMatrix reassemble(const SvdResult& s) {
  std::vector<cplx> d(s.d.begin(), s.d.end());
  return s.u * ComplexMatrix::diagonal(d) * s.v.adjoint();
}

}  // namespace

TEST_CASE("basic algebra") {
  ComplexMatrix a{{1.0, cplx(0, 1)}, {2.0, 3.0}};
  ComplexMatrix b{{cplx(0, -1), 1.0}, {0.0, 1.0}};
  const auto p = a * b;
  CHECK(p(0, 0) == cplx(0, -1));
  CHECK(p(0, 1) == cplx(1, 1));
  CHECK(p(1, 0) == cplx(0, -2));
  CHECK(p(1, 1) == cplx(5, 0));
  CHECK(a.adjoint()(0, 1) == 2.0);
  CHECK(a.adjoint()(1, 0) == cplx(0, -1));
  CHECK(gram_residual(ComplexMatrix::eye(3, 2)) == 0.0);
  CHECK(ComplexMatrix::identity(2).frobenius_norm() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("solve matches the product it came from") {
  Rng rng = make_rng(11, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = testutil::random_matrix(3, 3, rng);
    const std::vector<cplx> x{cplx(1, 2), cplx(-0.5, 0.25), cplx(0, -3)};
    const auto b = a * std::span<const cplx>(x);
    const auto got = solve(a, b);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(got[i] - x[i]) < 1e-10);
  }
  ComplexMatrix singular{{1.0, 2.0}, {2.0, 4.0}};
  const std::vector<cplx> rhs{1.0, 1.0};
  CHECK_THROWS_AS(solve(singular, rhs, 1e-13), NumericalError);
}

TEST_CASE("svd singular values against the 2x2 characteristic polynomial") {
  Rng rng = make_rng(12, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto a = testutil::random_matrix(2, 2, rng);
    const auto g = a.adjoint() * a;
    const double tr = g(0, 0).real() + g(1, 1).real();
    const double det = std::abs(det_cofactor(g));
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
    const double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
    const auto s = svd(a);
    CHECK(s.d[0] == doctest::Approx(std::sqrt(l1)).epsilon(1e-9));
    CHECK(s.d[1] == doctest::Approx(std::sqrt(std::max(0.0, l2))).epsilon(1e-7));
  }
}

TEST_CASE("svd factors reassemble for every supported shape") {
  Rng rng = make_rng(13, 0);
  for (std::size_t r = 1; r <= 4; ++r)
    for (std::size_t c = 1; c <= 4; ++c)
      for (int rep = 0; rep < 30; ++rep) {
        const auto a = testutil::random_matrix(r, c, rng);
        const auto s = svd(a);
        CHECK(max_abs_diff(reassemble(s), a) < 1e-12);
        CHECK(gram_residual(s.u) < 1e-12);
        CHECK(gram_residual(s.v) < 1e-12);
        CHECK(std::is_sorted(s.d.rbegin(), s.d.rend()));
        double energy = 0;
        for (double d : s.d) energy += d * d;
        CHECK(energy == doctest::Approx(std::pow(a.frobenius_norm(), 2)).epsilon(1e-12));
        if (r == c) {
          double prod = 1;
          for (double d : s.d) prod *= d;
          CHECK(prod == doctest::Approx(std::abs(det_cofactor(a))).epsilon(1e-9));
        }
      }
}

TEST_CASE("svd handles rank deficiency") {
  ComplexMatrix a{{1.0, 2.0, 0.0}, {2.0, 4.0, 0.0}, {0.0, 0.0, 0.0}};
  const auto s = svd(a);
  CHECK(s.d[0] == doctest::Approx(5.0));
  CHECK(s.d[1] < 1e-13);
  CHECK(s.d[2] < 1e-13);
  CHECK(gram_residual(s.u) < 1e-12);
  CHECK(max_abs_diff(reassemble(s), a) < 1e-12);

  const auto z = svd(ComplexMatrix(3, 2));
  CHECK(z.d[0] == 0.0);
  CHECK(gram_residual(z.u) < 1e-12);
}

TEST_CASE("svd rejects bad input") {
  CHECK_THROWS_AS(svd(ComplexMatrix(5, 2)), ConfigError);
  ComplexMatrix nan_in{{std::numeric_limits<double>::quiet_NaN(), 0.0}};
  CHECK_THROWS_AS(svd(nan_in), ValidationError);
}

TEST_CASE("phase normalization makes the last row real and keeps columns up to phase") {
  Rng rng = make_rng(14, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto v = svd(testutil::random_matrix(4, 4, rng)).v;
    const auto pn = phase_normalize(v);
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(pn.v_bar(3, c).imag() == 0.0);
      CHECK(pn.v_bar(3, c).real() >= 0.0);
      CHECK(std::abs(std::abs(pn.sigma(c, c)) - 1.0) < 1e-14);
    }
    CHECK(max_abs_diff(v * pn.sigma, pn.v_bar) < 1e-14);
  }
  ComplexMatrix zero_last{{1.0}, {0.0}};
  CHECK(phase_normalize(zero_last).sigma(0, 0) == 1.0);
}
