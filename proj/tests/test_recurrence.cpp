#include <doctest.h>

#include <set>

#include "cmnd/closed_form.hpp"
#include "cmnd/recurrence.hpp"
#include "cmnd/sigma_polynomial.hpp"
#include "test_util.hpp"

using namespace cmnd;

namespace {

GaussianRational pow_gr(const GaussianRational& x, int e) {
  GaussianRational r(1);
  for (int i = 0; i < e; ++i) r = r * x;
  return r;
}

ExactCovariance five_by_five_sparse() {
  const std::set<std::pair<int, int>> zeros{{0, 2}, {0, 3}, {1, 3}, {1, 4}, {2, 4}, {3, 4}};
  std::vector<std::vector<GaussianRational>> raw(5, std::vector<GaussianRational>(5));
  for (int h = 0; h < 5; ++h) raw[h][h] = GaussianRational(h + 1);
  test::TestRng rng(42);
  for (int h = 0; h < 5; ++h)
    for (int k = h + 1; k < 5; ++k) {
      GaussianRational v;
      if (!zeros.count({h, k}))
        v = GaussianRational(Rational(rng.uniform_int(1, 5)), Rational(rng.uniform_int(1, 3)));
      raw[h][k] = v;
      raw[k][h] = v.conj();
    }
  return validate_covariance(std::move(raw));
}

}  // namespace

TEST_CASE("base cases and elementary exponents") {
  test::TestRng rng(2);
  auto sigma = test::random_exact_hermitian(3, rng);
  CHECK(moment_recurrence<GaussianRational>(MultiIndex({0, 0, 0}, {0, 0, 0}), sigma) ==
        GaussianRational(1));
  CHECK(moment_recurrence<GaussianRational>(MultiIndex({1, 0, 0}, {0, 0, 0}), sigma).is_zero());
  FactorialTable fact;
  for (int h = 0; h < 3; ++h)
    for (int k = 0; k < 3; ++k)
      for (int c = 1; c <= 4; ++c) {
        std::vector<int> n(3, 0), m(3, 0);
        n[h] = c;
        m[k] = c;
        CHECK(moment_recurrence<GaussianRational>(MultiIndex(n, m), sigma) ==
              GaussianRational(Rational(fact(c))) * pow_gr(sigma(h, k), c));
      }
}

TEST_CASE("univariate sixth moment") {
  auto sigma = validate_covariance<GaussianRational>({{GaussianRational(2)}});
  // 3! * 2^3
  CHECK(moment_recurrence<GaussianRational>(MultiIndex({3}, {3}), sigma) == GaussianRational(48));
}

TEST_CASE("recurrence equals the closed form") {
  test::TestRng rng(14);
  for (int trial = 0; trial < 120; ++trial) {
    int p = rng.uniform_int(1, 4);
    auto sigma = test::random_exact_hermitian(p, rng, rng.chance(50) ? 50 : 0);
    auto alpha = test::random_balanced_alpha(p, rng.uniform_int(0, 5), rng);
    CHECK(moment_recurrence<GaussianRational>(alpha, sigma) ==
          moment_closed_form<GaussianRational>(alpha, sigma));
  }
}

TEST_CASE("symbolic recurrence equals the symbolic closed form") {
  test::TestRng rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    int p = rng.uniform_int(1, 3);
    auto alpha = test::random_balanced_alpha(p, rng.uniform_int(1, 3), rng);
    CHECK(moment_recurrence<SigmaPolynomial>(alpha, SymbolicSigma(p)) ==
          moment_closed_form<SigmaPolynomial>(alpha, SymbolicSigma(p)));
  }
}

TEST_CASE("memoization is value-transparent") {
  test::TestRng rng(38);
  for (int trial = 0; trial < 40; ++trial) {
    int p = rng.uniform_int(1, 3);
    auto sigma = test::random_exact_hermitian(p, rng, 30);
    auto alpha = test::random_balanced_alpha(p, rng.uniform_int(0, 4), rng);
    CHECK(moment_recurrence<GaussianRational>(alpha, sigma, {.memoize = false}) ==
          moment_recurrence<GaussianRational>(alpha, sigma, {.memoize = true}));
  }
}

TEST_CASE("pivoting from either side gives conjugate results") {
  // Running the recurrence on the swapped multi-index reduces along the
  // M side of the original; the two moments must be conjugates.
  test::TestRng rng(50);
  for (int trial = 0; trial < 40; ++trial) {
    int p = rng.uniform_int(1, 3);
    auto sigma = test::random_exact_hermitian(p, rng, 30);
    auto alpha = test::random_balanced_alpha(p, rng.uniform_int(1, 4), rng);
    CHECK(moment_recurrence<GaussianRational>(alpha.conj_swapped(), sigma) ==
          moment_recurrence<GaussianRational>(alpha, sigma).conj());
  }
}

TEST_CASE("univariate recurrence system") {
  GaussianRational gamma(Rational(5, 3));
  auto sigma = validate_covariance<GaussianRational>({{gamma}});
  auto alpha = MultiIndex({1}, {1});
  auto sys = build_recurrence_system<GaussianRational>(
      alpha, sigma, [&](const MultiIndex& a) { return moment_recurrence<GaussianRational>(a, sigma); });
  REQUIRE(sys.columns == std::vector<std::pair<int, int>>{{0, 0}});
  CHECK(sys.A[0][0] == gamma);
  CHECK(sys.A[1][0] == gamma);
  CHECK(sys.t == std::vector<GaussianRational>{GaussianRational(1)});
  CHECK(sys.b == std::vector<int>{1, 1});
  auto at = sys.apply_A_t();
  CHECK(at[0] == gamma);  // = nu(1,1)
  CHECK(at[1] == gamma);
}

TEST_CASE("A t = nu b holds row by row") {
  test::TestRng rng(62);
  for (int trial = 0; trial < 60; ++trial) {
    int p = rng.uniform_int(1, 4);
    auto sigma = test::random_exact_hermitian(p, rng, 40);
    auto alpha = test::random_balanced_alpha(p, rng.uniform_int(1, 4), rng);
    auto nu = moment_recurrence<GaussianRational>(alpha, sigma);
    auto sys = build_recurrence_system<GaussianRational>(alpha, sigma, [&](const MultiIndex& a) {
      return moment_recurrence<GaussianRational>(a, sigma);
    });
    auto at = sys.apply_A_t();
    for (int r = 0; r < 2 * p; ++r) {
      if (sys.b[r] == 1)
        CHECK(at[r] == nu);
      else
        CHECK(at[r].is_zero());
    }
    // rows outside the supports carry no column weight at all
    for (int h = 0; h < p; ++h)
      if (alpha.n(h) == 0)
        for (const auto& entry : sys.A[h]) CHECK(entry.is_zero());
    for (int k = 0; k < p; ++k)
      if (alpha.m(k) == 0)
        for (const auto& entry : sys.A[p + k]) CHECK(entry.is_zero());
  }
}

TEST_CASE("block annihilation residuals vanish") {
  test::TestRng rng(74);
  for (int trial = 0; trial < 50; ++trial) {
    int p = rng.uniform_int(1, 4);
    auto sigma = test::random_exact_hermitian(p, rng, 40);
    auto alpha = test::random_balanced_alpha(p, rng.uniform_int(1, 4), rng);
    auto s = build_sparsity(alpha, sigma);
    for (int r = 0; r < static_cast<int>(s.partition_M.size()); ++r)
      CHECK(check_linear_combination_annihilation<GaussianRational>(alpha, sigma, r).is_zero());
  }
}

TEST_CASE("annihilation on the sparse 5x5 blocks") {
  auto sigma = five_by_five_sparse();
  // N = {1..5}, M = {1,4,5}: two blocks, {1,5} and {4} (1-based)
  std::vector<int> n(5, 1), m(5, 0);
  m[0] = 2;
  m[3] = 1;
  m[4] = 2;
  MultiIndex alpha(n, m);
  auto s = build_sparsity(alpha, sigma);
  REQUIRE(s.partition_M.size() == 2);
  for (int r = 0; r < 2; ++r)
    CHECK(check_linear_combination_annihilation<GaussianRational>(alpha, sigma, r).is_zero());
  CHECK_THROWS_WITH_AS(
      (check_linear_combination_annihilation<GaussianRational>(alpha, sigma, 2)),
      doctest::Contains("UnknownBlock"), error);
  CHECK_THROWS_WITH_AS(
      (check_linear_combination_annihilation<GaussianRational>(alpha, sigma, -1)),
      doctest::Contains("UnknownBlock"), error);
}

TEST_CASE("dimension mismatch is rejected") {
  test::TestRng rng(86);
  auto sigma = test::random_exact_hermitian(2, rng);
  CHECK_THROWS_WITH_AS(
      (moment_recurrence<GaussianRational>(MultiIndex({1}, {1}), sigma)),
      doctest::Contains("DimensionMismatch"), error);
}
