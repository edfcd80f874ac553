#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cmnd/errors.hpp"
#include "cmnd/multi_index.hpp"

namespace cmnd {

/// A point a of the index set I(alpha): a p x p nonnegative integer
/// matrix with row sums n and column sums m, decomposing alpha into
/// elementary exponents beta_hk with multiplicities a_hk.
class CoefficientMatrix {
 public:
  CoefficientMatrix(int p, std::vector<int> entries) : p_(p), a_(std::move(entries)) {}
  explicit CoefficientMatrix(int p) : p_(p), a_(static_cast<std::size_t>(p) * p, 0) {}

  int p() const { return p_; }
  int operator()(int i, int j) const { return a_[i * p_ + j]; }
  int& at(int i, int j) { return a_[i * p_ + j]; }
  const std::vector<int>& flat() const { return a_; }

  int row_sum(int i) const {
    int s = 0;
    for (int j = 0; j < p_; ++j) s += (*this)(i, j);
    return s;
  }
  int col_sum(int j) const {
    int s = 0;
    for (int i = 0; i < p_; ++i) s += (*this)(i, j);
    return s;
  }

  bool has_margins(const MultiIndex& alpha) const {
    if (alpha.p() != p_) return false;
    for (int i = 0; i < p_; ++i)
      if (row_sum(i) != alpha.n(i) || col_sum(i) != alpha.m(i)) return false;
    return true;
  }

  friend bool operator==(const CoefficientMatrix& x, const CoefficientMatrix& y) {
    return x.p_ == y.p_ && x.a_ == y.a_;
  }
  friend bool operator<(const CoefficientMatrix& x, const CoefficientMatrix& y) {
    return x.a_ < y.a_;
  }

 private:
  int p_;
  std::vector<int> a_;
};

/// Nested bounds l_ij <= a_ij <= L_ij for the cell (i,j) (0-based),
/// given the entries fixed at all cells row-major before (i,j).
/// The lower bound sums the fixed cells with h <= i, k <= j; the upper
/// bound is the remaining row/column budget.
inline std::pair<int, int> bounds(const MultiIndex& alpha, const CoefficientMatrix& partial,
                                  int i, int j) {
  const int p = alpha.p();
  auto lower = [&](int ii, int jj) {
    int v = 0;
    for (int h = 0; h <= ii; ++h) v += alpha.n(h);
    for (int k = jj + 1; k < p; ++k) v -= alpha.m(k);
    for (int h = 0; h <= ii; ++h)
      for (int k = 0; k <= jj; ++k)
        if (h < ii || k < jj) v -= partial(h, k);
    return std::max(0, v);
  };
  auto upper = [&](int ii, int jj) {
    int r = alpha.n(ii);
    for (int k = 0; k < jj; ++k) r -= partial(ii, k);
    int c = alpha.m(jj);
    for (int h = 0; h < ii; ++h) c -= partial(h, jj);
    return std::min(r, c);
  };
  // Every earlier cell must respect its own bounds.
  for (int h = 0; h < p; ++h) {
    for (int k = 0; k < p; ++k) {
      if (h > i || (h == i && k >= j)) break;
      int v = partial(h, k);
      if (v < lower(h, k) || v > upper(h, k))
        throw error(errc::out_of_range_prefix, "entry (" + std::to_string(h + 1) + "," +
                                                   std::to_string(k + 1) + ") violates its bounds");
    }
  }
  return {lower(i, j), upper(i, j)};
}

namespace detail {

template <class Visit>
class IndexSetWalker {
 public:
  IndexSetWalker(const MultiIndex& alpha, Visit& visit, const std::vector<bool>* zero_mask)
      : alpha_(alpha), p_(alpha.p()), visit_(visit), zero_mask_(zero_mask),
        work_(alpha.p()), row_rem_(alpha.n()), col_rem_(alpha.m()) {
    pref_n_.resize(p_ + 1, 0);
    suff_m_.resize(p_ + 1, 0);
    for (int h = 0; h < p_; ++h) pref_n_[h + 1] = pref_n_[h] + alpha.n(h);
    for (int k = p_ - 1; k >= 0; --k) suff_m_[k] = suff_m_[k + 1] + alpha.m(k);
  }

  bool masked(int i, int j) const { return zero_mask_ && (*zero_mask_)[i * p_ + j]; }

  // Enumerate the free (p-1)x(p-1) block with the nested bounds, then
  // fill the forced last row and column, rejecting negatives.
  void run(int first_lo, int first_hi) {
    placed_ = 0;
    walk(0, 0, first_lo, first_hi);
  }

 private:
  // Lower bound at free cell (i,j): all cells with h <= i, k <= j other
  // than (i,j) itself are already fixed at this point of the walk.
  int lower(int i, int j) const {
    int v = pref_n_[i + 1] - suff_m_[j + 1];
    for (int h = 0; h <= i; ++h)
      for (int k = 0; k <= j; ++k)
        if (h < i || k < j) v -= work_(h, k);
    return std::max(0, v);
  }

  void walk(int i, int j, int lo_override, int hi_override) {
    if (i == p_ - 1) {
      finish();
      return;
    }
    if (j == p_ - 1) {
      walk(i + 1, 0, -1, -1);
      return;
    }
    int lo = std::max(lower(i, j), 0);
    int hi = std::min(row_rem_[i], col_rem_[j]);
    if (lo_override >= 0) lo = std::max(lo, lo_override);
    if (hi_override >= 0) hi = std::min(hi, hi_override);
    if (masked(i, j)) {
      if (lo > 0) return;
      hi = std::min(hi, 0);
    }
    for (int v = lo; v <= hi; ++v) {
      work_.at(i, j) = v;
      row_rem_[i] -= v;
      col_rem_[j] -= v;
      walk(i, j + 1, -1, -1);
      row_rem_[i] += v;
      col_rem_[j] += v;
    }
    work_.at(i, j) = 0;
  }

  void finish() {
    // Forced entries: a_{i,p} and a_{p,j} absorb the remaining margins.
    for (int i = 0; i < p_ - 1; ++i) {
      int v = row_rem_[i];
      if (v < 0 || (v > 0 && masked(i, p_ - 1))) return;
      work_.at(i, p_ - 1) = v;
    }
    int corner = alpha_.n(p_ - 1);
    for (int j = 0; j < p_ - 1; ++j) {
      int v = col_rem_[j];
      if (v < 0 || (v > 0 && masked(p_ - 1, j))) return;
      work_.at(p_ - 1, j) = v;
      corner -= v;
    }
    if (corner < 0 || (corner > 0 && masked(p_ - 1, p_ - 1))) return;
    work_.at(p_ - 1, p_ - 1) = corner;
    visit_(const_cast<const CoefficientMatrix&>(work_));
  }

  const MultiIndex& alpha_;
  int p_;
  Visit& visit_;
  const std::vector<bool>* zero_mask_;
  CoefficientMatrix work_;
  std::vector<int> row_rem_, col_rem_;
  std::vector<int> pref_n_, suff_m_;
  int placed_ = 0;
};

}  // namespace detail

/// Lazily enumerated slice of I(alpha).  The full stream is
/// enumerate_index_set; split_by_first_cell yields disjoint sub-streams
/// (split on the value of the first free cell) safe to consume on
/// different threads.  An optional zero mask restricts the stream to
/// matrices with a_hk = 0 on masked cells (sparsity-aware pruning).
class IndexSetStream {
 public:
  explicit IndexSetStream(MultiIndex alpha, std::optional<std::vector<bool>> zero_mask = {})
      : alpha_(std::move(alpha)), zero_mask_(std::move(zero_mask)) {
    if (!alpha_.balanced())
      throw error(errc::unbalanced_degrees, "sum(n) != sum(m)");
  }

  template <class Visit>
  void for_each(Visit&& visit) const {
    detail::IndexSetWalker<Visit> w(alpha_, visit,
                                    zero_mask_ ? &*zero_mask_ : nullptr);
    w.run(first_lo_, first_hi_);
  }

  std::vector<IndexSetStream> split_by_first_cell() const {
    std::vector<IndexSetStream> out;
    const int p = alpha_.p();
    if (p == 1) {
      out.push_back(*this);
      return out;
    }
    int lo = std::max(0, alpha_.n(0) - (alpha_.total_degree_m() - alpha_.m(0)).convert_to<int>());
    int hi = std::min(alpha_.n(0), alpha_.m(0));
    for (int v = lo; v <= hi; ++v) {
      IndexSetStream s = *this;
      s.first_lo_ = s.first_hi_ = v;
      out.push_back(std::move(s));
    }
    return out;
  }

  std::vector<CoefficientMatrix> collect() const {
    std::vector<CoefficientMatrix> out;
    for_each([&](const CoefficientMatrix& a) { out.push_back(a); });
    return out;
  }

  const MultiIndex& alpha() const { return alpha_; }

 private:
  MultiIndex alpha_;
  std::optional<std::vector<bool>> zero_mask_;
  int first_lo_ = -1, first_hi_ = -1;
};

inline IndexSetStream enumerate_index_set(const MultiIndex& alpha) {
  return IndexSetStream(alpha);
}

/// Independent reference enumerator: unconstrained nested loops over all
/// p^2 cells bounded only by the remaining row/column budgets, keeping
/// the matrices whose margins match.  Test oracle; materializes the set.
inline std::vector<CoefficientMatrix> brute_force_margin_matrices(const MultiIndex& alpha) {
  if (!alpha.balanced())
    throw error(errc::unbalanced_degrees, "sum(n) != sum(m)");
  const int p = alpha.p();
  std::vector<CoefficientMatrix> out;
  CoefficientMatrix work(p);
  std::vector<int> row_rem = alpha.n(), col_rem = alpha.m();
  auto rec = [&](auto&& self, int cell) -> void {
    if (cell == p * p) {
      if (work.has_margins(alpha)) out.push_back(work);
      return;
    }
    int i = cell / p, j = cell % p;
    int hi = std::min(row_rem[i], col_rem[j]);
    for (int v = 0; v <= hi; ++v) {
      work.at(i, j) = v;
      row_rem[i] -= v;
      col_rem[j] -= v;
      self(self, cell + 1);
      row_rem[i] += v;
      col_rem[j] += v;
    }
    work.at(i, j) = 0;
  };
  rec(rec, 0);
  return out;
}

}  // namespace cmnd
