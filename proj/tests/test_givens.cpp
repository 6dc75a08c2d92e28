#include <cmath>
#include <numbers>

#include "doctest.h"
#include "grfb/error.hpp"
#include "grfb/givens.hpp"
#include "test_util.hpp"

using namespace grfb;

TEST_CASE("parameter counts per shape") {
  const std::vector<std::pair<GrDims, std::size_t>> expected{
      {{2, 1}, 2}, {{2, 2}, 2}, {{3, 1}, 4}, {{3, 2}, 6}, {{3, 3}, 6},
      {{4, 1}, 6}, {{4, 2}, 10}, {{4, 3}, 12}, {{4, 4}, 12}};
  for (const auto& [dims, n] : expected) {
    CHECK(dims.parameter_count() == n);
    CHECK(canonical_slots(dims).size() == n);
  }
}

TEST_CASE("canonical slot order") {
  std::vector<std::string> names;
  for (const auto& s : canonical_slots({4, 2})) names.push_back(s.name());
  CHECK(names == std::vector<std::string>{"phi11", "phi21", "phi31", "psi21", "psi31", "psi41", "phi22",
                                          "phi32", "psi32", "psi42"});
  names.clear();
  for (const auto& s : canonical_slots({3, 3})) names.push_back(s.name());
  CHECK(names == std::vector<std::string>{"phi11", "phi21", "psi21", "psi31", "phi22", "psi32"});
}

TEST_CASE("dims parsing and validation") {
  CHECK(GrDims::parse("3x2") == GrDims{3, 2});
  CHECK(GrDims{4, 1}.label() == "4x1");
  CHECK_THROWS_AS(GrDims::parse("3x"), ConfigError);
  CHECK_THROWS_AS(GrDims::parse("2x3"), ConfigError);
  CHECK_THROWS_AS(GrDims::parse("5x1"), ConfigError);
}

TEST_CASE("identity columns decompose to zero angles") {
  const auto p = gr_decompose(ComplexMatrix::eye(3, 2), {3, 2});
  for (double a : p.flat()) CHECK(a == doctest::Approx(0.0));
  CHECK(max_abs_diff(gr_reconstruct(p), ComplexMatrix::eye(3, 2)) < 1e-15);
}

TEST_CASE("single rotation example") {
  // [cos t, sin t]^T: psi21 = t, phi11 = 0.
  const double t = 0.3;
  ComplexMatrix w{{std::cos(t)}, {std::sin(t)}};
  const auto p = gr_decompose(w, {2, 1});
  CHECK(p.columns[0].psis[0] == doctest::Approx(t));
  CHECK(p.columns[0].phis[0] == doctest::Approx(0.0));
  // A phase on the top entry shows up in phi11.
  ComplexMatrix w2{{std::polar(std::cos(t), 1.0)}, {std::sin(t)}};
  const auto p2 = gr_decompose(w2, {2, 1});
  CHECK(p2.columns[0].phis[0] == doctest::Approx(1.0));
}

TEST_CASE("decompose and reconstruct are inverse for random inputs") {
  Rng rng = make_rng(21, 0);
  for (int n = 2; n <= 4; ++n)
    for (int k = 1; k <= n; ++k)
      for (int rep = 0; rep < 200; ++rep) {
        const auto w = testutil::random_normalized_unitary(static_cast<std::size_t>(n), static_cast<std::size_t>(k), rng);
        const auto p = gr_decompose(w, {n, k});
        CHECK(max_abs_diff(gr_reconstruct(p), w) < 1e-12);
        CHECK(max_abs_diff(gr_reconstruct_dense(p), w) < 1e-12);
        for (double phi : p.phis()) CHECK((phi >= 0.0 && phi < 2 * std::numbers::pi));
        for (double psi : p.psis()) CHECK((psi >= 0.0 && psi <= std::numbers::pi / 2));
      }
}

TEST_CASE("fast and dense reconstruction agree on arbitrary angles") {
  Rng rng = make_rng(22, 0);
  std::uniform_real_distribution<double> phi(0, 2 * std::numbers::pi), psi(0, std::numbers::pi / 2);
  for (int rep = 0; rep < 200; ++rep) {
    const GrDims dims{4, 3};
    std::vector<double> phis(dims.phi_count()), psis(dims.psi_count());
    for (auto& x : phis) x = phi(rng);
    for (auto& x : psis) x = psi(rng);
    const auto p = GivensParams::from_split(dims, phis, psis);
    const auto w = gr_reconstruct(p);
    CHECK(max_abs_diff(w, gr_reconstruct_dense(p)) < 1e-13);
    CHECK(gram_residual(w) < 1e-13);
    const auto back = gr_decompose(w, dims);
    for (std::size_t j = 0; j < phis.size(); ++j)
      CHECK(testutil::wrap_distance(back.phis()[j], phis[j]) < 1e-9);
    for (std::size_t j = 0; j < psis.size(); ++j) CHECK(back.psis()[j] == doctest::Approx(psis[j]).epsilon(1e-9));
  }
}

TEST_CASE("flat and split layouts agree") {
  const GrDims dims{3, 2};
  const std::vector<double> flat{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto p = GivensParams::from_flat(dims, flat);
  CHECK(p.flat() == flat);
  CHECK(p.phis() == std::vector<double>{0.1, 0.2, 0.5});
  CHECK(p.psis() == std::vector<double>{0.3, 0.4, 0.6});
  CHECK_THROWS_AS(GivensParams::from_flat(dims, {0.1}), ValidationError);
}

TEST_CASE("decompose rejects inputs outside its domain") {
  ComplexMatrix not_unitary{{1.0}, {1.0}};
  CHECK_THROWS_AS(gr_decompose(not_unitary, {2, 1}), ValidationError);
  ComplexMatrix complex_last{{0.0}, {cplx(0, 1)}};
  CHECK_THROWS_AS(gr_decompose(complex_last, {2, 1}), ValidationError);
  CHECK_THROWS_AS(gr_decompose(ComplexMatrix::eye(3, 2), {3, 1}), ValidationError);
}
