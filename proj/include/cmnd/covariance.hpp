#pragma once

#include <cmath>
#include <type_traits>
#include <vector>

#include "cmnd/errors.hpp"
#include "cmnd/scalar.hpp"

namespace cmnd {

/// Hermitian covariance matrix sigma_hk, the source of the elementary
/// moments.  S is GaussianRational (exact mode) or Complex (float mode).
/// Immutable after construction; construct through validate_covariance.
template <class S>
class Covariance {
 public:
  int p() const { return p_; }
  const S& operator()(int h, int k) const { return entries_[h * p_ + k]; }

  bool is_structural_zero(int h, int k) const {
    return scalar_traits<S>::is_zero((*this)(h, k));
  }

  template <class T>
  friend Covariance<T> validate_covariance(std::vector<std::vector<T>> raw);

  /// Scale every entry by c.
  Covariance scaled(const S& c) const {
    Covariance r = *this;
    for (auto& e : r.entries_) e = e * c;
    return r;
  }

 private:
  explicit Covariance(std::vector<std::vector<S>> raw) {
    p_ = static_cast<int>(raw.size());
    if (p_ == 0) throw error(errc::dimension_mismatch, "empty matrix");
    for (const auto& row : raw)
      if (static_cast<int>(row.size()) != p_)
        throw error(errc::dimension_mismatch, "matrix is not square");

    if constexpr (std::is_same_v<S, Complex>) {
      double maxmag = 0.0;
      for (const auto& row : raw)
        for (const auto& e : row) maxmag = std::max(maxmag, std::abs(e));
      const double tol = 1e-12 * maxmag;
      for (int h = 0; h < p_; ++h)
        for (int k = h; k < p_; ++k)
          if (std::abs(raw[h][k] - std::conj(raw[k][h])) > tol)
            throw error(errc::not_hermitian, "entry (" + std::to_string(h + 1) + "," +
                                                 std::to_string(k + 1) + ") violates conjugate symmetry");
      for (int h = 0; h < p_; ++h)
        if (raw[h][h].imag() != 0.0 || raw[h][h].real() <= 0.0)
          throw error(errc::non_positive_diagonal,
                      "diagonal entry " + std::to_string(h + 1) + " must be real and positive");
    } else {
      for (int h = 0; h < p_; ++h)
        for (int k = h; k < p_; ++k)
          if (raw[h][k] != scalar_traits<S>::conj(raw[k][h]))
            throw error(errc::not_hermitian, "entry (" + std::to_string(h + 1) + "," +
                                                 std::to_string(k + 1) + ") violates conjugate symmetry");
      for (int h = 0; h < p_; ++h)
        if (!raw[h][h].is_real() || !(raw[h][h].re() > 0))
          throw error(errc::non_positive_diagonal,
                      "diagonal entry " + std::to_string(h + 1) + " must be real and positive");
    }

    entries_.reserve(static_cast<std::size_t>(p_) * p_);
    for (auto& row : raw)
      for (auto& e : row) entries_.push_back(std::move(e));
  }

  int p_ = 0;
  std::vector<S> entries_;
};

using ExactCovariance = Covariance<GaussianRational>;
using FloatCovariance = Covariance<Complex>;

template <class S>
Covariance<S> validate_covariance(std::vector<std::vector<S>> raw) {
  return Covariance<S>(std::move(raw));
}

/// Identity covariance of dimension p.
template <class S>
Covariance<S> identity_covariance(int p) {
  std::vector<std::vector<S>> raw(p, std::vector<S>(p, scalar_traits<S>::zero()));
  for (int h = 0; h < p; ++h) raw[h][h] = scalar_traits<S>::one();
  return validate_covariance(std::move(raw));
}

}  // namespace cmnd
