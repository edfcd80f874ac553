#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "cmnd/errors.hpp"
#include "cmnd/rational.hpp"

namespace cmnd {

/// Exponent vector (n_1, m_1, ..., n_p, m_p) of a complex monomial
/// prod z_h^{n_h} conj(z_k)^{m_k}.  p >= 1, all entries >= 0.
class MultiIndex {
 public:
  MultiIndex(std::vector<int> n, std::vector<int> m) : n_(std::move(n)), m_(std::move(m)) {
    if (n_.empty() || n_.size() != m_.size())
      throw error(errc::dimension_mismatch, "need len(n) == len(m) >= 1");
    for (int v : n_)
      if (v < 0) throw error(errc::constraint_error, "negative exponent in n");
    for (int v : m_)
      if (v < 0) throw error(errc::constraint_error, "negative exponent in m");
  }

  /// From the interleaved form (n1, m1, n2, m2, ...).
  static MultiIndex from_interleaved(const std::vector<int>& alpha) {
    if (alpha.empty() || alpha.size() % 2 != 0)
      throw error(errc::constraint_error, "interleaved exponent list must have even positive length");
    std::vector<int> n, m;
    for (std::size_t i = 0; i < alpha.size(); i += 2) {
      n.push_back(alpha[i]);
      m.push_back(alpha[i + 1]);
    }
    return {std::move(n), std::move(m)};
  }

  int p() const { return static_cast<int>(n_.size()); }
  int n(int h) const { return n_[h]; }
  int m(int k) const { return m_[k]; }
  const std::vector<int>& n() const { return n_; }
  const std::vector<int>& m() const { return m_; }

  Int total_degree_n() const {
    Int s = 0;
    for (int v : n_) s += v;
    return s;
  }
  Int total_degree_m() const {
    Int s = 0;
    for (int v : m_) s += v;
    return s;
  }
  bool balanced() const { return total_degree_n() == total_degree_m(); }
  bool all_zero() const { return total_degree_n() == 0 && total_degree_m() == 0; }

  /// alpha - beta_hk, i.e. decrement n_h and m_k by one (0-based h, k).
  MultiIndex decremented(int h, int k) const {
    if (n_[h] < 1 || m_[k] < 1)
      throw error(errc::constraint_error, "decrement below zero");
    MultiIndex r = *this;
    --r.n_[h];
    --r.m_[k];
    return r;
  }

  /// Swap the roles of n and m (exponent vector of the conjugate monomial).
  MultiIndex conj_swapped() const { return {m_, n_}; }

  std::vector<int> interleaved() const {
    std::vector<int> a;
    for (int j = 0; j < p(); ++j) {
      a.push_back(n_[j]);
      a.push_back(m_[j]);
    }
    return a;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.n_ == b.n_ && a.m_ == b.m_;
  }
  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.m_ < b.m_;
  }

 private:
  std::vector<int> n_;
  std::vector<int> m_;
};

/// beta_hk as a MultiIndex: n = e_h, m = e_k (0-based).
inline MultiIndex unit_pair_index(int p, int h, int k) {
  std::vector<int> n(p, 0), m(p, 0);
  n[h] = 1;
  m[k] = 1;
  return {std::move(n), std::move(m)};
}

/// (total n-degree, total m-degree) of alpha.
inline std::pair<Int, Int> total_degrees(const MultiIndex& alpha) {
  return {alpha.total_degree_n(), alpha.total_degree_m()};
}

}  // namespace cmnd
