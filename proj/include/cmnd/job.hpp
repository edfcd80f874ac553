#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cmnd/closed_form.hpp"
#include "cmnd/covariance.hpp"
#include "cmnd/errors.hpp"
#include "cmnd/monte_carlo.hpp"
#include "cmnd/multi_index.hpp"
#include "cmnd/permanent.hpp"
#include "cmnd/recurrence.hpp"
#include "cmnd/sigma_polynomial.hpp"
#include "cmnd/sparsity.hpp"

namespace cmnd {

inline constexpr const char* kVersion = "0.1.0";

enum class Mode { Exact, Float, Symbolic };
enum class Method { Closed, Recurrence, Permanent, Mc };

inline std::string mode_name(Mode m) {
  switch (m) {
    case Mode::Exact: return "exact";
    case Mode::Float: return "float";
    case Mode::Symbolic: return "symbolic";
  }
  return "?";
}
inline std::string method_name(Method m) {
  switch (m) {
    case Method::Closed: return "closed";
    case Method::Recurrence: return "recurrence";
    case Method::Permanent: return "permanent";
    case Method::Mc: return "mc";
  }
  return "?";
}

struct JobSpec {
  std::vector<int> alpha;  // interleaved (n1, m1, ..., np, mp)
  std::optional<std::vector<std::vector<GaussianRational>>> sigma_exact;
  std::optional<std::vector<std::vector<Complex>>> sigma_float;
  std::vector<Method> methods;
  Mode mode = Mode::Exact;
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;
  bool output_json = true;
  bool sparse_prune = false;
  unsigned threads = 1;
  int permanent_cap = 14;
  bool test_corrupt = false;  // test-only hook: perturbs the recurrence result
};

struct MethodReport {
  std::string method;
  nlohmann::json value;
  double wall_ms = 0.0;
  std::optional<double> std_error_re, std_error_im;
  std::optional<std::uint64_t> samples, seed;

  friend bool operator==(const MethodReport&, const MethodReport&) = default;
};

struct AgreementReport {
  std::string method_a, method_b;
  bool agree = false;
  double rel_diff = 0.0;

  friend bool operator==(const AgreementReport&, const AgreementReport&) = default;
};

struct Report {
  std::string version;
  std::string mode;
  std::vector<int> alpha;
  bool provably_null = false;
  std::string null_reason;
  std::string null_detail;
  std::optional<std::uint64_t> index_set_cardinality;
  std::vector<MethodReport> methods;
  std::vector<AgreementReport> agreements;
  int exit_code = 0;

  friend bool operator==(const Report&, const Report&) = default;
};

// ---------------------------------------------------------------------------
// parsing

/// "n1,m1,n2,m2,..." -> interleaved exponent list.
inline std::vector<int> parse_alpha(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(text.substr(pos), &used);
    } catch (const std::exception&) {
      throw error(errc::parse_error, "invalid integer at position " + std::to_string(pos));
    }
    if (v < 0)
      throw error(errc::parse_error, "negative exponent at position " + std::to_string(pos));
    out.push_back(v);
    pos += used;
    if (pos < text.size()) {
      if (text[pos] != ',')
        throw error(errc::parse_error, "expected ',' at position " + std::to_string(pos));
      ++pos;
    }
  }
  if (out.empty() || out.size() % 2 != 0)
    throw error(errc::parse_error, "alpha needs an even, positive number of entries");
  return out;
}

namespace detail {

inline Rational parse_rational(const std::string& s) {
  try {
    return Rational(s);
  } catch (const std::exception&) {
    throw error(errc::schema_error, "not a rational: \"" + s + "\"");
  }
}

struct SigmaParse {
  std::optional<std::vector<std::vector<GaussianRational>>> exact;
  std::optional<std::vector<std::vector<Complex>>> flt;
};

// One entry is a number (float), a string "a/b" (exact rational), an
// object {"re":..., "im":...} with both parts of the same kind, or null
// for a lower-triangle cell to be filled by conjugate symmetry.
// Mixing string and number entries in one matrix is a SchemaError.
inline SigmaParse parse_sigma_entries(const nlohmann::json& rows, Mode mode) {
  if (!rows.is_array() || rows.empty())
    throw error(errc::schema_error, "entries must be a non-empty array of rows");
  const std::size_t p = rows.size();

  enum Kind { Unset, ExactKind, FloatKind };
  Kind kind = Unset;
  auto note_kind = [&](Kind k) {
    if (kind == Unset) kind = k;
    if (kind != k)
      throw error(errc::schema_error, "mixing rational strings and numbers in one matrix");
  };

  struct Cell {
    bool present = false;
    GaussianRational ex;
    Complex fl;
  };
  std::vector<std::vector<Cell>> cells(p, std::vector<Cell>(p));

  auto scalar_part = [&](const nlohmann::json& v) -> std::variant<Rational, double> {
    if (v.is_string()) {
      note_kind(ExactKind);
      return parse_rational(v.get<std::string>());
    }
    if (v.is_number()) {
      if (mode == Mode::Exact) {
        // Integral numbers are exactly representable; anything else must
        // be spelled as a rational string.
        double d = v.get<double>();
        if (d == static_cast<long long>(d)) {
          note_kind(ExactKind);
          return Rational(static_cast<long long>(d));
        }
        throw error(errc::schema_error, "exact mode needs rational strings for non-integers");
      }
      note_kind(FloatKind);
      return v.get<double>();
    }
    throw error(errc::schema_error, "entry parts must be numbers or rational strings");
  };

  for (std::size_t h = 0; h < p; ++h) {
    if (!rows[h].is_array() || rows[h].size() != p)
      throw error(errc::schema_error, "entries row " + std::to_string(h + 1) +
                                          " must have " + std::to_string(p) + " columns");
    for (std::size_t k = 0; k < p; ++k) {
      const auto& e = rows[h][k];
      if (e.is_null()) {
        if (k >= h)
          throw error(errc::schema_error, "upper triangle plus diagonal is required");
        continue;
      }
      Cell c;
      c.present = true;
      if (e.is_object()) {
        if (!e.contains("re") || !e.contains("im"))
          throw error(errc::schema_error, "complex entry needs fields re and im");
        auto re = scalar_part(e.at("re"));
        auto im = scalar_part(e.at("im"));
        if (std::holds_alternative<Rational>(re)) {
          c.ex = GaussianRational(std::get<Rational>(re), std::get<Rational>(im));
        } else {
          c.fl = Complex{std::get<double>(re), std::get<double>(im)};
        }
      } else {
        auto re = scalar_part(e);
        if (std::holds_alternative<Rational>(re))
          c.ex = GaussianRational(std::get<Rational>(re));
        else
          c.fl = Complex{std::get<double>(re), 0.0};
      }
      cells[h][k] = std::move(c);
    }
  }

  // Missing lower-triangle cells come from the conjugate of the upper
  // triangle; present ones are validated by validate_covariance.
  for (std::size_t h = 0; h < p; ++h)
    for (std::size_t k = 0; k < h; ++k)
      if (!cells[h][k].present) {
        cells[h][k].present = true;
        cells[h][k].ex = cells[k][h].ex.conj();
        cells[h][k].fl = std::conj(cells[k][h].fl);
      }

  SigmaParse out;
  if (kind == FloatKind) {
    std::vector<std::vector<Complex>> m(p, std::vector<Complex>(p));
    for (std::size_t h = 0; h < p; ++h)
      for (std::size_t k = 0; k < p; ++k) m[h][k] = cells[h][k].fl;
    out.flt = std::move(m);
  } else {
    std::vector<std::vector<GaussianRational>> m(p, std::vector<GaussianRational>(p));
    for (std::size_t h = 0; h < p; ++h)
      for (std::size_t k = 0; k < p; ++k) m[h][k] = cells[h][k].ex;
    out.exact = std::move(m);
  }
  return out;
}

}  // namespace detail

/// Reads a sigma document: either a bare array of rows, or an object
/// {"p": int, "entries": [[...]], "alpha": [...] (optional)}.
inline void apply_sigma_json(const nlohmann::json& doc, JobSpec& job) {
  const nlohmann::json* rows = nullptr;
  if (doc.is_array()) {
    rows = &doc;
  } else if (doc.is_object()) {
    if (!doc.contains("entries")) throw error(errc::schema_error, "missing field: entries");
    rows = &doc.at("entries");
    if (doc.contains("p")) {
      if (!doc.at("p").is_number_integer() ||
          doc.at("p").get<long long>() != static_cast<long long>(rows->size()))
        throw error(errc::schema_error, "field p does not match entries");
    }
    if (doc.contains("alpha")) {
      if (!doc.at("alpha").is_array())
        throw error(errc::schema_error, "field alpha must be an array");
      std::vector<int> a;
      for (const auto& v : doc.at("alpha")) {
        if (!v.is_number_integer() || v.get<long long>() < 0)
          throw error(errc::schema_error, "alpha entries must be nonnegative integers");
        a.push_back(v.get<int>());
      }
      if (job.alpha.empty()) job.alpha = std::move(a);
    }
  } else {
    throw error(errc::schema_error, "sigma document must be an array or object");
  }
  auto parsed = detail::parse_sigma_entries(*rows, job.mode);
  job.sigma_exact = std::move(parsed.exact);
  job.sigma_float = std::move(parsed.flt);
}

/// Cross-field constraints; throws ConstraintError.
inline void validate_job(const JobSpec& job) {
  if (job.alpha.empty() || job.alpha.size() % 2 != 0)
    throw error(errc::constraint_error, "alpha is required (even, positive length)");
  bool wants_mc = false;
  for (Method m : job.methods) wants_mc = wants_mc || m == Method::Mc;
  if (wants_mc && job.mode != Mode::Float)
    throw error(errc::constraint_error, "method mc requires --mode float");
  if (job.mode != Mode::Symbolic) {
    const std::size_t p = job.alpha.size() / 2;
    if (job.mode == Mode::Exact && !job.sigma_exact)
      throw error(errc::constraint_error, "exact mode requires a rational sigma matrix");
    if (job.mode == Mode::Float && !job.sigma_float)
      throw error(errc::constraint_error, "float mode requires a numeric sigma matrix");
    const auto& rows = job.mode == Mode::Exact ? job.sigma_exact->size() : job.sigma_float->size();
    if (rows != p)
      throw error(errc::dimension_mismatch, "sigma dimension does not match alpha");
  }
  if (job.methods.empty())
    throw error(errc::constraint_error, "no method requested");
}

// ---------------------------------------------------------------------------
// running

namespace detail {

inline nlohmann::json json_of(const GaussianRational& v) {
  return {{"re", v.re().str()}, {"im", v.im().str()}};
}
inline nlohmann::json json_of(const Complex& v) {
  return {{"re", v.real()}, {"im", v.imag()}};
}

using Value = std::variant<GaussianRational, Complex, SigmaPolynomial>;

inline bool values_agree(const Value& a, const Value& b, double float_tol, double* rel_diff) {
  *rel_diff = 0.0;
  if (std::holds_alternative<Complex>(a)) {
    Complex x = std::get<Complex>(a), y = std::get<Complex>(b);
    double scale = std::max({std::abs(x), std::abs(y), 1e-300});
    *rel_diff = std::abs(x - y) / scale;
    return *rel_diff <= float_tol || (std::abs(x) == 0.0 && std::abs(y) == 0.0);
  }
  return a == b;
}

}  // namespace detail

/// Runs the verdict plus every requested method and assembles the
/// report.  Exit code 0 on success, 2 on cross-method disagreement.
inline Report run_job(const JobSpec& job) {
  validate_job(job);
  MultiIndex alpha = MultiIndex::from_interleaved(job.alpha);
  const int p = alpha.p();

  Report rep;
  rep.version = kVersion;
  rep.mode = mode_name(job.mode);
  rep.alpha = job.alpha;

  auto covariance_exact = [&] {
    return validate_covariance(*job.sigma_exact);
  };
  auto covariance_float = [&] {
    return validate_covariance(*job.sigma_float);
  };

  // Verdict first.
  NullVerdict verdict;
  if (job.mode == Mode::Exact)
    verdict = null_verdict(alpha, covariance_exact());
  else if (job.mode == Mode::Float)
    verdict = null_verdict(alpha, covariance_float());
  else
    verdict = null_verdict(alpha, SymbolicSigma(p));
  rep.provably_null = verdict.is_provably_null;
  rep.null_reason = verdict.reason_name();
  if (verdict.reason == NullVerdict::Reason::EmptyNeighborhood)
    rep.null_detail = std::string(verdict.side == NullVerdict::Side::N ? "N" : "M") + "," +
                      std::to_string(verdict.index + 1);
  else if (verdict.reason == NullVerdict::Reason::BlockImbalance)
    rep.null_detail = "block " + std::to_string(verdict.block_id) + ": n_sum=" +
                      verdict.n_sum.str() + " m_sum=" + verdict.m_sum.str();

  std::vector<std::pair<std::string, detail::Value>> computed;

  auto timed = [&](Method method, auto&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    detail::Value v = fn();
    auto t1 = std::chrono::steady_clock::now();
    if (job.test_corrupt && method == Method::Recurrence) {
      if (auto* g = std::get_if<GaussianRational>(&v)) *g += GaussianRational(1);
      if (auto* c = std::get_if<Complex>(&v)) *c += Complex{1.0, 0.0};
      if (auto* s = std::get_if<SigmaPolynomial>(&v)) *s += SigmaPolynomial(1);
    }
    MethodReport mr;
    mr.method = method_name(method);
    mr.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::visit(
        [&](const auto& val) {
          using T = std::decay_t<decltype(val)>;
          if constexpr (std::is_same_v<T, SigmaPolynomial>)
            mr.value = val.str(p);
          else
            mr.value = detail::json_of(val);
        },
        v);
    computed.push_back({mr.method, std::move(v)});
    rep.methods.push_back(std::move(mr));
  };

  ClosedFormOptions cf_opts;
  cf_opts.sparse_prune = job.sparse_prune;
  cf_opts.threads = job.threads;
  PermanentOptions perm_opts;
  perm_opts.max_degree = job.permanent_cap;

  for (Method method : job.methods) {
    switch (method) {
      case Method::Closed: {
        std::size_t count = 0;
        if (job.mode == Mode::Exact)
          timed(method, [&] {
            return detail::Value(
                moment_closed_form<GaussianRational>(alpha, covariance_exact(), cf_opts, &count));
          });
        else if (job.mode == Mode::Float)
          timed(method, [&] {
            return detail::Value(moment_closed_form<Complex>(alpha, covariance_float(), cf_opts, &count));
          });
        else
          timed(method, [&] {
            return detail::Value(
                moment_closed_form<SigmaPolynomial>(alpha, SymbolicSigma(p), cf_opts, &count));
          });
        rep.index_set_cardinality = count;
        break;
      }
      case Method::Recurrence:
        if (job.mode == Mode::Exact)
          timed(method, [&] { return detail::Value(moment_recurrence<GaussianRational>(alpha, covariance_exact())); });
        else if (job.mode == Mode::Float)
          timed(method, [&] { return detail::Value(moment_recurrence<Complex>(alpha, covariance_float())); });
        else
          timed(method, [&] { return detail::Value(moment_recurrence<SigmaPolynomial>(alpha, SymbolicSigma(p))); });
        break;
      case Method::Permanent:
        if (job.mode == Mode::Exact)
          timed(method, [&] { return detail::Value(moment_permanent<GaussianRational>(alpha, covariance_exact(), perm_opts)); });
        else if (job.mode == Mode::Float)
          timed(method, [&] { return detail::Value(moment_permanent<Complex>(alpha, covariance_float(), perm_opts)); });
        else
          timed(method, [&] { return detail::Value(moment_permanent<SigmaPolynomial>(alpha, SymbolicSigma(p), perm_opts)); });
        break;
      case Method::Mc: {
        auto t0 = std::chrono::steady_clock::now();
        McEstimate est =
            moment_monte_carlo(alpha, covariance_float(), job.mc_samples, job.seed, job.threads);
        auto t1 = std::chrono::steady_clock::now();
        MethodReport mr;
        mr.method = "mc";
        mr.value = detail::json_of(est.mean);
        mr.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        mr.std_error_re = est.std_error_re;
        mr.std_error_im = est.std_error_im;
        mr.samples = est.samples;
        mr.seed = est.seed;
        computed.push_back({"mc", detail::Value(est.mean)});
        rep.methods.push_back(std::move(mr));
        break;
      }
    }
  }

  // Pairwise agreement among the deterministic methods; mc is reported
  // but statistical, so it never drives the exit code.
  for (std::size_t i = 0; i < computed.size(); ++i)
    for (std::size_t j = i + 1; j < computed.size(); ++j) {
      if (computed[i].first == "mc" || computed[j].first == "mc") continue;
      AgreementReport ar;
      ar.method_a = computed[i].first;
      ar.method_b = computed[j].first;
      ar.agree = detail::values_agree(computed[i].second, computed[j].second, 1e-9, &ar.rel_diff);
      if (!ar.agree) rep.exit_code = 2;
      rep.agreements.push_back(std::move(ar));
    }
  return rep;
}

// ---------------------------------------------------------------------------
// report serialization

inline nlohmann::json report_to_json(const Report& r) {
  nlohmann::json j;
  j["version"] = r.version;
  j["mode"] = r.mode;
  j["alpha"] = r.alpha;
  j["null_verdict"] = {{"provably_null", r.provably_null},
                       {"reason", r.null_reason},
                       {"detail", r.null_detail}};
  if (r.index_set_cardinality) j["index_set_cardinality"] = *r.index_set_cardinality;
  j["methods"] = nlohmann::json::array();
  for (const auto& m : r.methods) {
    nlohmann::json mj{{"method", m.method}, {"value", m.value}, {"wall_ms", m.wall_ms}};
    if (m.std_error_re) mj["std_error_re"] = *m.std_error_re;
    if (m.std_error_im) mj["std_error_im"] = *m.std_error_im;
    if (m.samples) mj["samples"] = *m.samples;
    if (m.seed) mj["seed"] = *m.seed;
    j["methods"].push_back(std::move(mj));
  }
  j["agreements"] = nlohmann::json::array();
  for (const auto& a : r.agreements)
    j["agreements"].push_back({{"a", a.method_a},
                               {"b", a.method_b},
                               {"agree", a.agree},
                               {"rel_diff", a.rel_diff}});
  j["exit_code"] = r.exit_code;
  return j;
}

inline Report report_from_json(const nlohmann::json& j) {
  Report r;
  r.version = j.at("version").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.alpha = j.at("alpha").get<std::vector<int>>();
  r.provably_null = j.at("null_verdict").at("provably_null").get<bool>();
  r.null_reason = j.at("null_verdict").at("reason").get<std::string>();
  r.null_detail = j.at("null_verdict").at("detail").get<std::string>();
  if (j.contains("index_set_cardinality"))
    r.index_set_cardinality = j.at("index_set_cardinality").get<std::uint64_t>();
  for (const auto& mj : j.at("methods")) {
    MethodReport m;
    m.method = mj.at("method").get<std::string>();
    m.value = mj.at("value");
    m.wall_ms = mj.at("wall_ms").get<double>();
    if (mj.contains("std_error_re")) m.std_error_re = mj.at("std_error_re").get<double>();
    if (mj.contains("std_error_im")) m.std_error_im = mj.at("std_error_im").get<double>();
    if (mj.contains("samples")) m.samples = mj.at("samples").get<std::uint64_t>();
    if (mj.contains("seed")) m.seed = mj.at("seed").get<std::uint64_t>();
    r.methods.push_back(std::move(m));
  }
  for (const auto& aj : j.at("agreements")) {
    AgreementReport a;
    a.method_a = aj.at("a").get<std::string>();
    a.method_b = aj.at("b").get<std::string>();
    a.agree = aj.at("agree").get<bool>();
    a.rel_diff = aj.at("rel_diff").get<double>();
    r.agreements.push_back(std::move(a));
  }
  r.exit_code = j.at("exit_code").get<int>();
  return r;
}

/// Human-oriented rendering; not stability-guaranteed.
inline std::string render_text(const Report& r) {
  std::string s;
  s += "mode: " + r.mode + "\n";
  s += "null verdict: " + r.null_reason +
       (r.null_detail.empty() ? "" : " (" + r.null_detail + ")") + "\n";
  if (r.index_set_cardinality)
    s += "index set size: " + std::to_string(*r.index_set_cardinality) + "\n";
  for (const auto& m : r.methods) {
    s += m.method + ": ";
    if (m.value.is_string())
      s += m.value.get<std::string>();
    else
      s += m.value.dump();
    if (m.std_error_re)
      s += "  (std err " + std::to_string(*m.std_error_re) + ", " +
           std::to_string(*m.std_error_im) + "; " + std::to_string(*m.samples) + " samples)";
    s += "\n";
  }
  for (const auto& a : r.agreements)
    s += a.method_a + " vs " + a.method_b + ": " + (a.agree ? "agree" : "DISAGREE") + "\n";
  return s;
}

}  // namespace cmnd
