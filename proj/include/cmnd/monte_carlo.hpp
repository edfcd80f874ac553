#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <thread>
#include <vector>

#include "cmnd/covariance.hpp"
#include "cmnd/errors.hpp"
#include "cmnd/multi_index.hpp"
#include "cmnd/rng.hpp"

namespace cmnd {

/// Lower-triangular L with L L* = sigma.  Fails on non-PD input.
inline std::vector<std::vector<Complex>> cholesky(const FloatCovariance& sigma) {
  const int p = sigma.p();
  std::vector<std::vector<Complex>> L(p, std::vector<Complex>(p, Complex{0.0, 0.0}));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= i; ++j) {
      Complex s = sigma(i, j);
      for (int k = 0; k < j; ++k) s -= L[i][k] * std::conj(L[j][k]);
      if (i == j) {
        double diag = s.real();
        if (!(diag > 0.0) || !std::isfinite(diag))
          throw error(errc::not_positive_definite, "Cholesky pivot " + std::to_string(i + 1));
        L[i][i] = Complex{std::sqrt(diag), 0.0};
      } else {
        L[i][j] = s / L[j][j];
      }
    }
  }
  return L;
}

/// Deterministic stream of draws from the centered complex normal with
/// covariance sigma: Z = L U with U of independent unit-variance complex
/// normal coordinates (real and imaginary parts of variance 1/2).
class CmndSampler {
 public:
  CmndSampler(const FloatCovariance& sigma, std::uint64_t seed)
      : p_(sigma.p()), L_(cholesky(sigma)), rng_(seed) {}

  int p() const { return p_; }

  std::vector<Complex> sample(std::uint64_t index) const {
    std::vector<Complex> u(p_);
    for (int j = 0; j < p_; ++j) {
      auto [x, y] = rng_.gaussian_pair(index * p_ + j);
      // variance 1/2 per real component gives unit complex variance
      u[j] = Complex{x, y} * std::sqrt(0.5);
    }
    std::vector<Complex> z(p_, Complex{0.0, 0.0});
    for (int i = 0; i < p_; ++i)
      for (int j = 0; j <= i; ++j) z[i] += L_[i][j] * u[j];
    return z;
  }

 private:
  int p_;
  std::vector<std::vector<Complex>> L_;
  CounterRng rng_;
};

template <class F>
void sample_cmnd(const FloatCovariance& sigma, std::uint64_t count, std::uint64_t seed, F&& f) {
  CmndSampler s(sigma, seed);
  for (std::uint64_t i = 0; i < count; ++i) f(s.sample(i));
}

struct McEstimate {
  Complex mean{0.0, 0.0};
  double std_error_re = 0.0;
  double std_error_im = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;

  /// Componentwise |mean - reference| <= k * std_error.
  bool consistent_with(const Complex& ref, double k) const {
    return std::abs(mean.real() - ref.real()) <= k * std_error_re &&
           std::abs(mean.imag() - ref.imag()) <= k * std_error_im;
  }
};

/// Sample mean of prod z_h^{n_h} conj(z_k)^{m_k} with componentwise
/// standard errors.  Accumulation runs over fixed-size chunks reduced in
/// index order, so the result is bit-identical for any thread count.
inline McEstimate moment_monte_carlo(const MultiIndex& alpha, const FloatCovariance& sigma,
                                     std::uint64_t samples, std::uint64_t seed,
                                     unsigned threads = 1) {
  if (alpha.p() != sigma.p())
    throw error(errc::dimension_mismatch, "alpha and sigma have different dimension");
  if (samples < 2) throw error(errc::insufficient_samples, "need at least 2 samples");

  constexpr std::uint64_t kChunk = 1 << 16;
  const std::uint64_t nchunks = (samples + kChunk - 1) / kChunk;
  struct Sums {
    double re = 0, im = 0, re2 = 0, im2 = 0;
  };
  std::vector<Sums> chunk_sums(nchunks);

  CmndSampler sampler(sigma, seed);
  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t lo = c * kChunk;
    const std::uint64_t hi = std::min(samples, lo + kChunk);
    Sums s;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const auto z = sampler.sample(i);
      Complex v{1.0, 0.0};
      for (int h = 0; h < alpha.p(); ++h) {
        for (int e = 0; e < alpha.n(h); ++e) v *= z[h];
        for (int e = 0; e < alpha.m(h); ++e) v *= std::conj(z[h]);
      }
      s.re += v.real();
      s.im += v.imag();
      s.re2 += v.real() * v.real();
      s.im2 += v.imag() * v.imag();
    }
    chunk_sums[c] = s;
  };

  if (threads <= 1 || nchunks == 1) {
    for (std::uint64_t c = 0; c < nchunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::uint64_t c; (c = next.fetch_add(1)) < nchunks;) run_chunk(c);
      });
    for (auto& th : pool) th.join();
  }

  Sums total;
  for (const auto& s : chunk_sums) {
    total.re += s.re;
    total.im += s.im;
    total.re2 += s.re2;
    total.im2 += s.im2;
  }

  McEstimate est;
  est.samples = samples;
  est.seed = seed;
  const double n = static_cast<double>(samples);
  est.mean = Complex{total.re / n, total.im / n};
  const double var_re = std::max(0.0, (total.re2 - n * est.mean.real() * est.mean.real()) / (n - 1));
  const double var_im = std::max(0.0, (total.im2 - n * est.mean.imag() * est.mean.imag()) / (n - 1));
  est.std_error_re = std::sqrt(var_re / n);
  est.std_error_im = std::sqrt(var_im / n);
  return est;
}

}  // namespace cmnd
