#pragma once

#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "cmnd/covariance.hpp"
#include "cmnd/errors.hpp"
#include "cmnd/multi_index.hpp"

namespace cmnd {

/// Supporting sets, neighborhoods, and induced partitions of the
/// covariance sparsity bipartite graph.  All indices 0-based.
struct SparsityStructure {
  std::vector<int> N;                    // h with n_h != 0, sorted
  std::vector<int> M;                    // k with m_k != 0, sorted
  std::map<int, std::set<int>> S_N;      // h in N -> { k in M : sigma_hk != 0 }
  std::map<int, std::set<int>> S_M;      // k in M -> { h in N : sigma_hk != 0 }
  std::vector<std::set<int>> partition_M;  // connected components of the graph on M
  std::vector<std::set<int>> partition_N;

  /// Index of the partition_M block containing k, or -1.
  int block_of_m(int k) const {
    for (std::size_t r = 0; r < partition_M.size(); ++r)
      if (partition_M[r].count(k)) return static_cast<int>(r);
    return -1;
  }
};

namespace detail {

// Union-find over a set of vertices, seeded by merging each
// neighborhood into one component.
inline std::vector<std::set<int>> components_from_neighborhoods(
    const std::vector<int>& verts, const std::map<int, std::set<int>>& hoods) {
  std::map<int, int> parent;
  for (int v : verts) parent[v] = v;
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& [h, nb] : hoods) {
    if (nb.empty()) continue;
    int root = find(*nb.begin());
    for (int v : nb) parent[find(v)] = root;
  }
  std::map<int, std::set<int>> blocks;
  for (int v : verts) blocks[find(v)].insert(v);
  std::vector<std::set<int>> out;
  for (auto& [root, blk] : blocks) out.push_back(std::move(blk));
  return out;
}

}  // namespace detail

template <class Sigma>
SparsityStructure build_sparsity(const MultiIndex& alpha, const Sigma& sigma) {
  if (alpha.p() != sigma.p())
    throw error(errc::dimension_mismatch, "alpha and sigma have different dimension");
  SparsityStructure s;
  for (int h = 0; h < alpha.p(); ++h) {
    if (alpha.n(h) != 0) s.N.push_back(h);
    if (alpha.m(h) != 0) s.M.push_back(h);
  }
  for (int h : s.N) {
    auto& nb = s.S_N[h];
    for (int k : s.M)
      if (!sigma.is_structural_zero(h, k)) nb.insert(k);
  }
  for (int k : s.M) {
    auto& nb = s.S_M[k];
    for (int h : s.N)
      if (!sigma.is_structural_zero(h, k)) nb.insert(h);
  }
  s.partition_M = detail::components_from_neighborhoods(s.M, s.S_N);
  s.partition_N = detail::components_from_neighborhoods(s.N, s.S_M);
  return s;
}

struct NullVerdict {
  enum class Reason {
    DegreeImbalance,
    EmptyNeighborhood,
    BlockImbalance,
    NotProvablyNull,
  };

  bool is_provably_null = false;
  Reason reason = Reason::NotProvablyNull;

  // EmptyNeighborhood details: which side and which index (0-based).
  enum class Side { N, M } side = Side::N;
  int index = -1;

  // BlockImbalance details.
  int block_id = -1;
  Int n_sum = 0;
  Int m_sum = 0;

  std::string reason_name() const {
    switch (reason) {
      case Reason::DegreeImbalance: return "DegreeImbalance";
      case Reason::EmptyNeighborhood: return "EmptyNeighborhood";
      case Reason::BlockImbalance: return "BlockImbalance";
      case Reason::NotProvablyNull: return "NotProvablyNull";
    }
    return "?";
  }
};

/// Sufficient nullity test: degree imbalance, then empty neighborhoods
/// on either side, then block imbalance of the induced partition of M.
/// The first firing condition is reported.
template <class Sigma>
NullVerdict null_verdict(const MultiIndex& alpha, const Sigma& sigma) {
  NullVerdict v;
  if (alpha.total_degree_n() != alpha.total_degree_m()) {
    v.is_provably_null = true;
    v.reason = NullVerdict::Reason::DegreeImbalance;
    return v;
  }
  SparsityStructure s = build_sparsity(alpha, sigma);
  for (int h : s.N) {
    if (s.S_N.at(h).empty()) {
      v.is_provably_null = true;
      v.reason = NullVerdict::Reason::EmptyNeighborhood;
      v.side = NullVerdict::Side::N;
      v.index = h;
      return v;
    }
  }
  for (int k : s.M) {
    if (s.S_M.at(k).empty()) {
      v.is_provably_null = true;
      v.reason = NullVerdict::Reason::EmptyNeighborhood;
      v.side = NullVerdict::Side::M;
      v.index = k;
      return v;
    }
  }
  // Every S_N[h] is nonempty here, hence contained in exactly one block.
  for (std::size_t r = 0; r < s.partition_M.size(); ++r) {
    const auto& blk = s.partition_M[r];
    Int n_sum = 0, m_sum = 0;
    for (int h : s.N)
      if (blk.count(*s.S_N.at(h).begin())) n_sum += alpha.n(h);
    for (int k : blk) m_sum += alpha.m(k);
    if (n_sum != m_sum) {
      v.is_provably_null = true;
      v.reason = NullVerdict::Reason::BlockImbalance;
      v.block_id = static_cast<int>(r);
      v.n_sum = n_sum;
      v.m_sum = m_sum;
      return v;
    }
  }
  return v;
}

}  // namespace cmnd
