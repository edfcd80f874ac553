#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cmnd/covariance.hpp"
#include "cmnd/rational.hpp"
#include "cmnd/scalar.hpp"

namespace cmnd {

/// Sparse exponent matrix of a monomial in the entries sigma_hk.
/// Factors are kept sorted by (row, col); exponents are > 0.
class SigmaMonomial {
 public:
  using Cell = std::pair<int, int>;

  SigmaMonomial() = default;

  static SigmaMonomial variable(int h, int k) {
    SigmaMonomial m;
    m.factors_.push_back({{h, k}, 1});
    return m;
  }

  const std::vector<std::pair<Cell, int>>& factors() const { return factors_; }

  int total_degree() const {
    int d = 0;
    for (const auto& [c, e] : factors_) d += e;
    return d;
  }

  SigmaMonomial operator*(const SigmaMonomial& o) const {
    SigmaMonomial r;
    std::size_t i = 0, j = 0;
    while (i < factors_.size() || j < o.factors_.size()) {
      if (j == o.factors_.size() ||
          (i < factors_.size() && factors_[i].first < o.factors_[j].first)) {
        r.factors_.push_back(factors_[i++]);
      } else if (i == factors_.size() || o.factors_[j].first < factors_[i].first) {
        r.factors_.push_back(o.factors_[j++]);
      } else {
        r.factors_.push_back({factors_[i].first, factors_[i].second + o.factors_[j].second});
        ++i;
        ++j;
      }
    }
    return r;
  }

  /// Swap rows and columns (the monomial of the conjugated product).
  SigmaMonomial transposed() const {
    SigmaMonomial r;
    for (const auto& [c, e] : factors_) r.factors_.push_back({{c.second, c.first}, e});
    std::sort(r.factors_.begin(), r.factors_.end());
    return r;
  }

  /// Graded order: total degree first, then ascending lexicographic order
  /// on the dense row-major exponent vector.  A missing cell reads as
  /// exponent zero, so the monomial whose next factor sits at a later
  /// cell is the smaller one.
  friend bool operator<(const SigmaMonomial& a, const SigmaMonomial& b) {
    int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    std::size_t i = 0, j = 0;
    while (i < a.factors_.size() && j < b.factors_.size()) {
      const auto& fa = a.factors_[i];
      const auto& fb = b.factors_[j];
      if (fa.first == fb.first) {
        if (fa.second != fb.second) return fa.second < fb.second;
        ++i;
        ++j;
      } else {
        return fb.first < fa.first;
      }
    }
    return i == a.factors_.size() && j < b.factors_.size();
  }
  friend bool operator==(const SigmaMonomial& a, const SigmaMonomial& b) {
    return a.factors_ == b.factors_;
  }

  /// Exponent of sigma_hk in this monomial (0-based cell).
  int exponent(int h, int k) const {
    for (const auto& [c, e] : factors_)
      if (c == Cell{h, k}) return e;
    return 0;
  }

  std::string str(int p) const {
    if (factors_.empty()) return "1";
    std::string s;
    for (const auto& [c, e] : factors_) {
      if (!s.empty()) s += "*";
      s += "s" + std::to_string(c.first + 1) + (p > 9 ? "_" : "") + std::to_string(c.second + 1);
      if (e > 1) s += "^" + std::to_string(e);
    }
    return s;
  }

 private:
  std::vector<std::pair<Cell, int>> factors_;
};

/// Polynomial in the elementary moments sigma_hk with integer
/// coefficients.  No stored coefficient is zero.
class SigmaPolynomial {
 public:
  SigmaPolynomial() = default;
  SigmaPolynomial(const Int& c) {
    if (c != 0) terms_[SigmaMonomial{}] = c;
  }
  SigmaPolynomial(int c) : SigmaPolynomial(Int(c)) {}

  static SigmaPolynomial variable(int h, int k) {
    SigmaPolynomial r;
    r.terms_[SigmaMonomial::variable(h, k)] = 1;
    return r;
  }
  static SigmaPolynomial monomial(SigmaMonomial m, Int coeff) {
    SigmaPolynomial r;
    if (coeff != 0) r.terms_[std::move(m)] = std::move(coeff);
    return r;
  }

  const std::map<SigmaMonomial, Int>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  friend SigmaPolynomial operator+(const SigmaPolynomial& a, const SigmaPolynomial& b) {
    SigmaPolynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend SigmaPolynomial operator-(const SigmaPolynomial& a, const SigmaPolynomial& b) {
    SigmaPolynomial r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }
  friend SigmaPolynomial operator-(const SigmaPolynomial& a) {
    return SigmaPolynomial(0) - a;
  }
  friend SigmaPolynomial operator*(const SigmaPolynomial& a, const SigmaPolynomial& b) {
    SigmaPolynomial r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }
  SigmaPolynomial& operator+=(const SigmaPolynomial& o) { return *this = *this + o; }
  SigmaPolynomial& operator*=(const SigmaPolynomial& o) { return *this = *this * o; }

  friend bool operator==(const SigmaPolynomial& a, const SigmaPolynomial& b) {
    return a.terms_ == b.terms_;
  }

  SigmaPolynomial transposed() const {
    SigmaPolynomial r;
    for (const auto& [m, c] : terms_) r.add_term(m.transposed(), c);
    return r;
  }

  /// Substitute covariance entries for the variables.
  template <class S>
  S evaluate(const Covariance<S>& sigma) const {
    S total = scalar_traits<S>::zero();
    for (const auto& [m, c] : terms_) {
      S term = scalar_traits<S>::from_int(c);
      for (const auto& [cell, e] : m.factors())
        for (int i = 0; i < e; ++i) term = term * sigma(cell.first, cell.second);
      total = total + term;
    }
    return total;
  }

  /// Canonical text form: terms in graded-lex order, byte-stable.
  std::string str(int p) const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [m, c] : terms_) {
      if (s.empty()) {
        if (c < 0) s += "-";
      } else {
        s += c < 0 ? " - " : " + ";
      }
      Int ac = boost::multiprecision::abs(c);
      if (ac != 1 || m.factors().empty()) {
        s += ac.str();
        if (!m.factors().empty()) s += "*";
      }
      if (!m.factors().empty()) s += m.str(p);
    }
    return s;
  }

 private:
  void add_term(const SigmaMonomial& m, const Int& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (c != 0) terms_[m] = c;
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::map<SigmaMonomial, Int> terms_;
};

template <>
struct scalar_traits<SigmaPolynomial> {
  static SigmaPolynomial zero() { return {}; }
  static SigmaPolynomial one() { return {1}; }
  static bool is_zero(const SigmaPolynomial& s) { return s.is_zero(); }
  static SigmaPolynomial conj(const SigmaPolynomial& s) { return s.transposed(); }
  static SigmaPolynomial from_int(const Int& v) { return {v}; }
};

/// Generic covariance whose entries are the indeterminates s_hk.
/// No entry is a structural zero.
class SymbolicSigma {
 public:
  explicit SymbolicSigma(int p) : p_(p) {}
  int p() const { return p_; }
  SigmaPolynomial operator()(int h, int k) const { return SigmaPolynomial::variable(h, k); }
  bool is_structural_zero(int, int) const { return false; }

 private:
  int p_;
};

}  // namespace cmnd
