#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "cmnd/covariance.hpp"
#include "cmnd/multi_index.hpp"
#include "cmnd/scalar.hpp"
#include "cmnd/sparsity.hpp"

namespace cmnd {

namespace detail {

// Pivot h in N with the fewest nonzero branches, ties broken by
// smallest index.  Returns (h, S_N[h]); S_N[h] may be empty, in which
// case the recurrence is the empty sum and the moment is zero.
template <class Sigma>
std::pair<int, std::vector<int>> recurrence_pivot(const MultiIndex& alpha, const Sigma& sigma) {
  int best = -1;
  std::vector<int> best_nb;
  for (int h = 0; h < alpha.p(); ++h) {
    if (alpha.n(h) == 0) continue;
    std::vector<int> nb;
    for (int k = 0; k < alpha.p(); ++k)
      if (alpha.m(k) != 0 && !sigma.is_structural_zero(h, k)) nb.push_back(k);
    if (best < 0 || nb.size() < best_nb.size()) {
      best = h;
      best_nb = std::move(nb);
    }
  }
  return {best, std::move(best_nb)};
}

}  // namespace detail

struct RecurrenceOptions {
  bool memoize = true;
};

/// nu(alpha) by repeated degree reduction: pick a pivot h in N and sum
/// m_k sigma_hk nu(alpha - beta_hk) over the nonzero branches.  The
/// recursion is driven by an explicit work list, memoized on alpha.
template <class S, class Sigma>
S moment_recurrence(const MultiIndex& alpha, const Sigma& sigma,
                    const RecurrenceOptions& opts = {}) {
  if (alpha.p() != sigma.p())
    throw error(errc::dimension_mismatch, "alpha and sigma have different dimension");

  using Key = std::pair<std::vector<int>, std::vector<int>>;
  auto key_of = [](const MultiIndex& a) { return Key{a.n(), a.m()}; };
  std::map<Key, S> memo;

  // Leaf cases resolved without recursion; returns nullopt otherwise.
  auto leaf = [&](const MultiIndex& a) -> std::optional<S> {
    if (a.all_zero()) return scalar_traits<S>::one();
    if (a.total_degree_n() != a.total_degree_m()) return scalar_traits<S>::zero();
    return std::nullopt;
  };

  if (!opts.memoize) {
    // Reference path: plain recursion, no sharing of sub-results.
    std::function<S(const MultiIndex&)> eval = [&](const MultiIndex& a) -> S {
      if (auto v = leaf(a)) return *v;
      auto [h, branches] = detail::recurrence_pivot(a, sigma);
      S total = scalar_traits<S>::zero();
      for (int br : branches)
        total = total + scalar_traits<S>::from_int(a.m(br)) * sigma(h, br) *
                            eval(a.decremented(h, br));
      return total;
    };
    return eval(alpha);
  }

  std::vector<MultiIndex> stack{alpha};
  while (!stack.empty()) {
    const MultiIndex cur = stack.back();
    const Key k = key_of(cur);
    if (memo.count(k)) {
      stack.pop_back();
      continue;
    }
    if (auto v = leaf(cur)) {
      memo[k] = *v;
      stack.pop_back();
      continue;
    }
    auto [h, branches] = detail::recurrence_pivot(cur, sigma);
    if (branches.empty()) {
      memo[k] = scalar_traits<S>::zero();
      stack.pop_back();
      continue;
    }
    bool ready = true;
    for (int br : branches) {
      MultiIndex child = cur.decremented(h, br);
      if (!memo.count(key_of(child))) {
        if (ready) ready = false;
        stack.push_back(std::move(child));
      }
    }
    if (ready) {
      S total = scalar_traits<S>::zero();
      for (int br : branches) {
        const S& child = memo.at(key_of(cur.decremented(h, br)));
        total = total + scalar_traits<S>::from_int(cur.m(br)) * sigma(h, br) * child;
      }
      memo[k] = total;
      stack.pop_back();
    }
  }
  return memo.at(key_of(alpha));
}

/// The recurrence system A t = nu(alpha) b: one column per pivot pair
/// (h, k) with h in N, k in S_N[h], carrying sigma_hk (m_k e_h + n_h
/// e_{p+k}); t holds the reduced moments nu(alpha - beta_hk).
template <class S>
struct RecurrenceSystem {
  int p = 0;
  std::vector<std::pair<int, int>> columns;  // (h, k) per column, 0-based
  std::vector<std::vector<S>> A;             // 2p rows
  std::vector<S> t;
  std::vector<int> b;                        // 2p entries in {0, 1}

  std::vector<S> apply_A_t() const {
    std::vector<S> out(2 * p, scalar_traits<S>::zero());
    for (std::size_t c = 0; c < columns.size(); ++c)
      for (int r = 0; r < 2 * p; ++r) out[r] = out[r] + A[r][c] * t[c];
    return out;
  }
};

template <class S, class Sigma, class Lookup>
RecurrenceSystem<S> build_recurrence_system(const MultiIndex& alpha, const Sigma& sigma,
                                            Lookup&& nu_lookup) {
  if (alpha.p() != sigma.p())
    throw error(errc::dimension_mismatch, "alpha and sigma have different dimension");
  const int p = alpha.p();
  SparsityStructure s = build_sparsity(alpha, sigma);
  RecurrenceSystem<S> sys;
  sys.p = p;
  for (int h : s.N)
    for (int k : s.S_N.at(h)) sys.columns.push_back({h, k});
  sys.A.assign(2 * p, std::vector<S>(sys.columns.size(), scalar_traits<S>::zero()));
  for (std::size_t c = 0; c < sys.columns.size(); ++c) {
    auto [h, k] = sys.columns[c];
    const S shk = sigma(h, k);
    sys.A[h][c] = scalar_traits<S>::from_int(alpha.m(k)) * shk;
    sys.A[p + k][c] = scalar_traits<S>::from_int(alpha.n(h)) * shk;
    sys.t.push_back(nu_lookup(alpha.decremented(h, k)));
  }
  sys.b.assign(2 * p, 0);
  for (int h : s.N) sys.b[h] = 1;
  for (int k : s.M) sys.b[p + k] = 1;
  return sys;
}

/// Residual c_r^T A t - nu(alpha) c_r^T b for one block M_r of the
/// induced partition of M; exactly zero in exact arithmetic.
template <class S, class Sigma>
S check_linear_combination_annihilation(const MultiIndex& alpha, const Sigma& sigma,
                                        int block_id) {
  const int p = alpha.p();
  SparsityStructure s = build_sparsity(alpha, sigma);
  if (block_id < 0 || block_id >= static_cast<int>(s.partition_M.size()))
    throw error(errc::unknown_block, "block " + std::to_string(block_id));
  const auto& blk = s.partition_M[block_id];

  auto sys = build_recurrence_system<S>(
      alpha, sigma, [&](const MultiIndex& a) { return moment_recurrence<S>(a, sigma); });
  const S nu = moment_recurrence<S>(alpha, sigma);

  std::vector<Int> c(2 * p, 0);
  for (int i : s.N) {
    const auto& nb = s.S_N.at(i);
    if (!nb.empty() && std::includes(blk.begin(), blk.end(), nb.begin(), nb.end()))
      c[i] = alpha.n(i);
  }
  for (int j : blk) c[p + j] = -alpha.m(j);

  std::vector<S> At = sys.apply_A_t();
  S lhs = scalar_traits<S>::zero();
  Int cb = 0;
  for (int r = 0; r < 2 * p; ++r) {
    lhs = lhs + scalar_traits<S>::from_int(c[r]) * At[r];
    cb += c[r] * sys.b[r];
  }
  return lhs - nu * scalar_traits<S>::from_int(cb);
}

}  // namespace cmnd
