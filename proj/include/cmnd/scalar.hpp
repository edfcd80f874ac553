#pragma once

#include <complex>

#include "cmnd/rational.hpp"

namespace cmnd {

using Complex = std::complex<double>;

// Uniform scalar interface for the evaluation rings: exact Gaussian
// rationals and double-precision complex. Symbolic polynomials provide
// the same interface in sigma_polynomial.hpp.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<GaussianRational> {
  static GaussianRational zero() { return {}; }
  static GaussianRational one() { return {1}; }
  static bool is_zero(const GaussianRational& s) { return s.is_zero(); }
  static GaussianRational conj(const GaussianRational& s) { return s.conj(); }
  static GaussianRational from_int(const Int& v) { return {Rational(v)}; }
};

template <>
struct scalar_traits<Complex> {
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  // Bitwise zero only: structural sparsity must be declared by exact zeros.
  static bool is_zero(const Complex& s) { return s.real() == 0.0 && s.imag() == 0.0; }
  static Complex conj(const Complex& s) { return std::conj(s); }
  static Complex from_int(const Int& v) { return {v.convert_to<double>(), 0.0}; }
};

}  // namespace cmnd
