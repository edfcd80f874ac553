#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <type_traits>
#include <vector>

#include "cmnd/covariance.hpp"
#include "cmnd/multi_index.hpp"
#include "cmnd/scalar.hpp"
#include "cmnd/sigma_polynomial.hpp"

namespace cmnd {

/// Expansion of a balanced alpha into a d x d matrix whose permanent is
/// nu(alpha): row r repeats index h with multiplicity n_h, column c
/// repeats k with multiplicity m_k (ascending index, multiplicity
/// blocks), and B[r][c] = sigma_{rows[r], cols[c]}.
template <class S>
struct ExpandedMatrix {
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<std::vector<S>> B;

  int d() const { return static_cast<int>(rows.size()); }
};

template <class S, class Sigma>
ExpandedMatrix<S> expand_matrix(const MultiIndex& alpha, const Sigma& sigma) {
  ExpandedMatrix<S> em;
  for (int h = 0; h < alpha.p(); ++h)
    for (int i = 0; i < alpha.n(h); ++i) em.rows.push_back(h);
  for (int k = 0; k < alpha.p(); ++k)
    for (int i = 0; i < alpha.m(k); ++i) em.cols.push_back(k);
  em.B.assign(em.rows.size(), std::vector<S>(em.cols.size(), scalar_traits<S>::zero()));
  for (std::size_t r = 0; r < em.rows.size(); ++r)
    for (std::size_t c = 0; c < em.cols.size(); ++c) em.B[r][c] = sigma(em.rows[r], em.cols[c]);
  return em;
}

/// perm(B) by Ryser's inclusion-exclusion with Gray-code column updates.
/// Works in any commutative ring with subtraction.
template <class S>
S permanent_ryser(const std::vector<std::vector<S>>& B) {
  const int d = static_cast<int>(B.size());
  if (d == 0) return scalar_traits<S>::one();
  std::vector<S> row_sum(d, scalar_traits<S>::zero());
  S total = scalar_traits<S>::zero();
  const std::uint64_t end = std::uint64_t(1) << d;
  std::uint64_t gray = 0;
  for (std::uint64_t i = 1; i < end; ++i) {
    std::uint64_t next = i ^ (i >> 1);
    std::uint64_t diff = gray ^ next;
    int j = std::countr_zero(diff);
    bool added = next & diff;
    for (int r = 0; r < d; ++r)
      row_sum[r] = added ? row_sum[r] + B[r][j] : row_sum[r] - B[r][j];
    gray = next;
    S prod = scalar_traits<S>::one();
    for (int r = 0; r < d; ++r) prod = prod * row_sum[r];
    int popcount = std::popcount(next);
    if ((d - popcount) % 2 == 0)
      total = total + prod;
    else
      total = total - prod;
  }
  return total;
}

/// perm(B) by the naive permutation sum; used for symbolic entries where
/// Ryser's subtractions would blow up the term count.
template <class S>
S permanent_naive(const std::vector<std::vector<S>>& B) {
  const int d = static_cast<int>(B.size());
  if (d == 0) return scalar_traits<S>::one();
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  S total = scalar_traits<S>::zero();
  do {
    S prod = scalar_traits<S>::one();
    for (int r = 0; r < d; ++r) prod = prod * B[r][perm[r]];
    total = total + prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

struct PermanentOptions {
  int max_degree = 14;  // cost is 2^d * d
};

/// Independent oracle: nu(alpha) as the permanent of the expanded
/// covariance matrix; zero when the total degrees are unbalanced.
template <class S, class Sigma>
S moment_permanent(const MultiIndex& alpha, const Sigma& sigma,
                   const PermanentOptions& opts = {}) {
  if (alpha.p() != sigma.p())
    throw error(errc::dimension_mismatch, "alpha and sigma have different dimension");
  if (!alpha.balanced()) return scalar_traits<S>::zero();
  constexpr bool symbolic = std::is_same_v<S, SigmaPolynomial>;
  const int cap = symbolic ? std::min(opts.max_degree, 8) : opts.max_degree;
  if (alpha.total_degree_n() > cap)
    throw error(errc::degree_too_large,
                "expanded dimension exceeds " + std::to_string(cap));
  auto em = expand_matrix<S>(alpha, sigma);
  if constexpr (symbolic)
    return permanent_naive(em.B);
  else
    return permanent_ryser(em.B);
}

}  // namespace cmnd
