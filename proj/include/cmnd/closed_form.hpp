#pragma once

#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

#include "cmnd/covariance.hpp"
#include "cmnd/index_set.hpp"
#include "cmnd/multi_index.hpp"
#include "cmnd/scalar.hpp"
#include "cmnd/sparsity.hpp"

namespace cmnd {

namespace detail {

// Plain sum for exact and symbolic rings, compensated (Kahan) sum for
// floating complex so enumeration-order drift stays bounded.
template <class S>
struct Accumulator {
  S total = scalar_traits<S>::zero();
  void add(const S& v) { total = total + v; }
  void merge(const Accumulator& o) { total = total + o.total; }
};

template <>
struct Accumulator<Complex> {
  Complex total{0.0, 0.0};
  Complex comp{0.0, 0.0};
  void add(const Complex& v) {
    Complex y = v - comp;
    Complex t = total + y;
    comp = (t - total) - y;
    total = t;
  }
  void merge(const Accumulator& o) { add(o.total); add(-o.comp); }
};

}  // namespace detail

/// Pi(alpha, a): the closed-form addend for one coefficient matrix.
/// The rational prefactor prod n_h! m_h! / prod a_hk! is always an
/// integer; sigma^0 = 1 also when sigma = 0, and a zero factor with
/// positive exponent short-circuits the whole term to zero.
template <class S, class Sigma>
S term_value(const MultiIndex& alpha, const CoefficientMatrix& a, const Sigma& sigma,
             FactorialTable& fact) {
  if (!a.has_margins(alpha))
    throw error(errc::not_in_index_set, "margins of a do not match alpha");
  const int p = alpha.p();
  Int coeff = 1;
  for (int h = 0; h < p; ++h) coeff *= fact(alpha.n(h)) * fact(alpha.m(h));
  for (int h = 0; h < p; ++h)
    for (int k = 0; k < p; ++k) {
      const Int& d = fact(a(h, k));
      if (d != 1) {
        if (coeff % d != 0)
          throw error(errc::not_in_index_set, "non-integer term coefficient");
        coeff /= d;
      }
    }
  S value = scalar_traits<S>::from_int(coeff);
  for (int h = 0; h < p; ++h)
    for (int k = 0; k < p; ++k) {
      int e = a(h, k);
      if (e == 0) continue;
      if (sigma.is_structural_zero(h, k)) return scalar_traits<S>::zero();
      const S f = sigma(h, k);
      for (int i = 0; i < e; ++i) value = value * f;
    }
  return value;
}

template <class S, class Sigma>
S term_value(const MultiIndex& alpha, const CoefficientMatrix& a, const Sigma& sigma) {
  FactorialTable fact;
  return term_value<S>(alpha, a, sigma, fact);
}

struct ClosedFormOptions {
  bool sparse_prune = false;  // restrict enumeration to a_hk = 0 where sigma_hk = 0
  unsigned threads = 1;       // parallel chunks over the first free cell
};

/// nu(alpha) as the sum of Pi(alpha, a) over I(alpha), gated by the
/// degree-balance and provable-nullity tests.
template <class S, class Sigma>
S moment_closed_form(const MultiIndex& alpha, const Sigma& sigma,
                     const ClosedFormOptions& opts = {}, std::size_t* term_count = nullptr) {
  if (alpha.p() != sigma.p())
    throw error(errc::dimension_mismatch, "alpha and sigma have different dimension");
  if (term_count) *term_count = 0;
  if (!alpha.balanced()) return scalar_traits<S>::zero();
  if (null_verdict(alpha, sigma).is_provably_null) return scalar_traits<S>::zero();

  std::optional<std::vector<bool>> mask;
  if (opts.sparse_prune) {
    const int p = alpha.p();
    std::vector<bool> z(static_cast<std::size_t>(p) * p, false);
    for (int h = 0; h < p; ++h)
      for (int k = 0; k < p; ++k) z[h * p + k] = sigma.is_structural_zero(h, k);
    mask = std::move(z);
  }
  IndexSetStream stream(alpha, std::move(mask));

  auto sum_stream = [&](const IndexSetStream& s, detail::Accumulator<S>& acc,
                        std::size_t& count) {
    FactorialTable local_fact;
    s.for_each([&](const CoefficientMatrix& a) {
      acc.add(term_value<S>(alpha, a, sigma, local_fact));
      ++count;
    });
  };

  detail::Accumulator<S> acc;
  std::size_t count = 0;
  if (opts.threads <= 1) {
    sum_stream(stream, acc, count);
  } else {
    auto chunks = stream.split_by_first_cell();
    std::vector<detail::Accumulator<S>> partial(chunks.size());
    std::vector<std::size_t> counts(chunks.size(), 0);
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    unsigned nthreads = std::min<std::size_t>(opts.threads, chunks.size());
    for (unsigned t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lk(mu);
            if (next == chunks.size()) return;
            i = next++;
          }
          sum_stream(chunks[i], partial[i], counts[i]);
        }
      });
    }
    for (auto& th : pool) th.join();
    // Fixed merge order so exact and float results do not depend on the
    // thread schedule.
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      acc.merge(partial[i]);
      count += counts[i];
    }
  }
  if (term_count) *term_count = count;
  return acc.total;
}

}  // namespace cmnd
