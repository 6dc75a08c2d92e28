#include <cmath>
#include <numbers>

#include "doctest.h"
#include "grfb/error.hpp"
#include "grfb/quantizer.hpp"
#include "test_util.hpp"

using namespace grfb;
using std::numbers::pi;

namespace {

// Brute-force nearest level; phi distances wrap around the circle.
std::size_t brute_nearest(const std::vector<double>& levels, double x, bool circular) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double d = circular ? testutil::wrap_distance(x, levels[i]) : std::abs(x - levels[i]);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("grid levels follow the closed forms") {
  for (int b = 1; b <= 4; ++b) {
    const auto g = UniformGrid::psi(b);
    REQUIRE(g.size() == (1u << b));
    for (std::size_t k = 0; k < g.size(); ++k)
      CHECK(std::abs(g.level(k) - (k * pi / std::pow(2, b + 1) + pi / std::pow(2, b + 2))) < 1e-14);
  }
  for (int b = 2; b <= 6; ++b) {
    const auto g = UniformGrid::phi(b);
    for (std::size_t k = 0; k < g.size(); ++k)
      CHECK(std::abs(g.level(k) - (k * pi / std::pow(2, b - 1) + pi / std::pow(2, b))) < 1e-14);
  }
  const auto two = UniformGrid::psi(2).levels();
  const double deg = pi / 180;
  CHECK(std::abs(two[0] - 11.25 * deg) < 1e-14);
  CHECK(std::abs(two[1] - 33.75 * deg) < 1e-14);
  CHECK(std::abs(two[2] - 56.25 * deg) < 1e-14);
  CHECK(std::abs(two[3] - 78.75 * deg) < 1e-14);
  CHECK_THROWS_AS(UniformGrid::psi(0), ConfigError);
  CHECK_THROWS_AS(UniformGrid::phi(7), ConfigError);
}

TEST_CASE("nearest level agrees with exhaustive search") {
  Rng rng = make_rng(31, 0);
  std::uniform_real_distribution<double> phi(0, 2 * pi), psi(0, pi / 2);
  for (int b = 1; b <= 4; ++b) {
    const auto g = UniformGrid::psi(b);
    for (int rep = 0; rep < 2000; ++rep) {
      const double x = psi(rng);
      CHECK(nearest_level(g, x) == brute_nearest(g.levels(), x, false));
    }
  }
  for (int b = 2; b <= 6; ++b) {
    const auto g = UniformGrid::phi(b);
    for (int rep = 0; rep < 2000; ++rep) {
      const double x = phi(rng);
      CHECK(nearest_level(g, x) == brute_nearest(g.levels(), x, true));
    }
  }
}

TEST_CASE("phi quantization wraps around zero") {
  const auto g = UniformGrid::phi(3);  // levels pi/8 + k pi/4
  CHECK(nearest_level(g, 2 * pi - 0.01) == 7);
  CHECK(nearest_level(g, 0.01) == 0);
  CHECK(nearest_level(g, 0.0) == 0);  // tie between levels 0 and 7 resolves low
}

TEST_CASE("ties go to the lower index") {
  const auto g = UniformGrid::psi(1);  // pi/8, 3pi/8
  CHECK(nearest_level(g, pi / 4) == 0);
  const PsiCodebook cb({0.2, 0.4});
  CHECK(nearest_level(cb, 0.3) == 0);
}

TEST_CASE("codebook validation") {
  CHECK_NOTHROW(PsiCodebook({0.2967, 0.8727}));
  CHECK_THROWS_AS(PsiCodebook({}), ValidationError);
  CHECK_THROWS_AS(PsiCodebook({0.5, 0.4}), ValidationError);
  CHECK_THROWS_AS(PsiCodebook({0.5, 0.5}), ValidationError);
  CHECK_THROWS_AS(PsiCodebook({-0.1, 0.5}), ValidationError);
  CHECK_THROWS_AS(PsiCodebook({0.1, 2.0}), ValidationError);
}

TEST_CASE("uniform-angle quantization error shrinks with resolution") {
  Rng rng = make_rng(32, 0);
  std::uniform_real_distribution<double> psi(0, pi / 2), phi(0, 2 * pi);
  auto psi_mse = [&](int b) {
    const auto g = UniformGrid::psi(b);
    double s = 0;
    for (int i = 0; i < 20000; ++i) {
      const double x = psi(rng);
      s += std::pow(x - g.level(nearest_level(g, x)), 2);
    }
    return s / 20000;
  };
  auto phi_mse = [&](int b) {
    const auto g = UniformGrid::phi(b);
    double s = 0;
    for (int i = 0; i < 20000; ++i) {
      const double x = phi(rng);
      s += std::pow(testutil::wrap_distance(x, g.level(nearest_level(g, x))), 2);
    }
    return s / 20000;
  };
  // Uniform input on a uniform grid: step^2 / 12.
  for (int b = 1; b <= 4; ++b) {
    const double step = UniformGrid::psi(b).step();
    const double m = psi_mse(b);
    CHECK(m == doctest::Approx(step * step / 12).epsilon(0.05));
    if (b > 1) CHECK(m < psi_mse(b - 1));
  }
  for (int b = 3; b <= 6; ++b) CHECK(phi_mse(b) < phi_mse(b - 1));
}

TEST_CASE("fixed policy widths") {
  const auto p = BitAllocationPolicy::fixed({3, 2}, UniformGrid::psi(2), 3);
  CHECK_FALSE(p.is_dynamic());
  const std::vector<std::size_t> idx{0, 1, 2};
  CHECK(p.phi_bits(idx) == std::vector<int>{3, 3, 3});
  CHECK(p.message_bits(idx) == 15);
}

TEST_CASE("variable-rate policy for 3x1") {
  const auto p = variable_rate_policy();
  CHECK(p.is_dynamic());
  CHECK(p.psi_field_bits() == 1);
  const auto lv = quantizer_levels(p.psi_quantizer());
  CHECK(lv == std::vector<double>{0.2967, 0.8727});
  using V = std::vector<std::size_t>;
  CHECK(p.phi_bits(V{0, 0}) == std::vector<int>{4, 3});
  CHECK(p.phi_bits(V{1, 0}) == std::vector<int>{3, 4});
  CHECK(p.phi_bits(V{0, 1}) == std::vector<int>{3, 2});
  CHECK(p.phi_bits(V{1, 1}) == std::vector<int>{2, 3});
  CHECK(p.message_bits(V{0, 0}) == 9);
  CHECK(p.message_bits(V{1, 1}) == 7);
  CHECK_THROWS_AS(p.phi_bits(V{2, 0}), ValidationError);
}

TEST_CASE("dynamic policy rule must cover every tuple") {
  BitAllocationPolicy::Rule partial{{{0}, {3}}};
  CHECK_THROWS_AS(BitAllocationPolicy::dynamic({2, 1}, UniformGrid::psi(1), partial), ConfigError);
  BitAllocationPolicy::Rule full{{{0}, {3}}, {{1}, {2}}};
  CHECK_NOTHROW(BitAllocationPolicy::dynamic({2, 1}, UniformGrid::psi(1), full));
}

TEST_CASE("quantize then dequantize lands on grid levels") {
  Rng rng = make_rng(33, 0);
  const auto policy = variable_rate_policy();
  for (int rep = 0; rep < 500; ++rep) {
    const auto w = testutil::random_normalized_unitary(3, 1, rng);
    const auto p = gr_decompose(w, {3, 1});
    const auto q = quantize_gr(p, policy);
    CHECK(q.phi_bits == policy.phi_bits(q.psi_indices));
    CHECK(q.message_bits == policy.message_bits(q.psi_indices));
    const auto back = dequantize_gr(q);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(back.psis()[j] == quantizer_level(policy.psi_quantizer(), q.psi_indices[j]));
      CHECK(back.phis()[j] == UniformGrid::phi(q.phi_bits[j]).level(q.phi_indices[j]));
    }
    CHECK(quantize_gr(back, policy) == q);
  }
}

TEST_CASE("make_quantized range checks") {
  const auto policy = variable_rate_policy();
  CHECK_NOTHROW(make_quantized(policy, {0, 0}, {15, 7}));
  CHECK_THROWS_AS(make_quantized(policy, {0, 0}, {16, 0}), ValidationError);
  CHECK_THROWS_AS(make_quantized(policy, {0, 2}, {0, 0}), ValidationError);
  CHECK_THROWS_AS(make_quantized(policy, {0}, {0, 0}), ValidationError);
}

TEST_CASE("quantize rejects mismatched dims") {
  const auto policy = variable_rate_policy();
  const auto p = gr_decompose(ComplexMatrix::eye(3, 2), {3, 2});
  CHECK_THROWS_AS(quantize_gr(p, policy), ConfigError);
}

TEST_CASE("average bits over a product distribution") {
  const auto policy = variable_rate_policy();
  const auto dist = product_distribution({{0.25, 0.75}, {0.5, 0.5}});
  // 9, 7 and 7, 7 bit messages under the table: (0,0)->9 (1,0)->9 (0,1)->7 (1,1)->7
  const double expect = 0.25 * 0.5 * 9 + 0.75 * 0.5 * 9 + 0.25 * 0.5 * 7 + 0.75 * 0.5 * 7;
  CHECK(average_bits(policy, dist) == doctest::Approx(expect));
  CHECK_THROWS_AS(average_bits(policy, product_distribution({{0.5, 0.4}, {0.5, 0.5}})), ValidationError);
}
