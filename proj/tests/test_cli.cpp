#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>
#include <sys/wait.h>

#include "cmnd/job.hpp"
#include "test_util.hpp"

using namespace cmnd;
using nlohmann::json;

namespace {

// Runs the installed binary (path from CMND_CLI) and captures stdout.
int run_cli(const std::string& args, std::string* out) {
  const char* bin = std::getenv("CMND_CLI");
  REQUIRE_MESSAGE(bin != nullptr, "CMND_CLI must point at the cli binary");
  std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string text;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, got);
  int status = pclose(pipe);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<GaussianRational>> five_by_five_sparse_raw() {
  const std::set<std::pair<int, int>> zeros{{0, 2}, {0, 3}, {1, 3}, {1, 4}, {2, 4}, {3, 4}};
  std::vector<std::vector<GaussianRational>> raw(5, std::vector<GaussianRational>(5));
  for (int h = 0; h < 5; ++h) raw[h][h] = GaussianRational(h + 1);
  test::TestRng rng(42);
  for (int h = 0; h < 5; ++h)
    for (int k = h + 1; k < 5; ++k) {
      GaussianRational v;
      if (!zeros.count({h, k}))
        v = GaussianRational(Rational(rng.uniform_int(1, 5)), Rational(rng.uniform_int(1, 3)));
      raw[h][k] = v;
      raw[k][h] = v.conj();
    }
  return raw;
}

}  // namespace

TEST_CASE("alpha parsing") {
  CHECK(parse_alpha("1,1") == std::vector<int>{1, 1});
  CHECK(parse_alpha("2,1,2,3") == std::vector<int>{2, 1, 2, 3});
  CHECK(parse_alpha("0,0") == std::vector<int>{0, 0});
  CHECK_THROWS_WITH_AS(parse_alpha(""), doctest::Contains("ParseError"), error);
  CHECK_THROWS_WITH_AS(parse_alpha("1,2,3"), doctest::Contains("ParseError"), error);
  CHECK_THROWS_WITH_AS(parse_alpha("1,x"), doctest::Contains("position 2"), error);
  CHECK_THROWS_WITH_AS(parse_alpha("-1,1"), doctest::Contains("position 0"), error);
  CHECK_THROWS_WITH_AS(parse_alpha("1;1"), doctest::Contains("expected ','"), error);
}

TEST_CASE("sigma schema: exact strings with conjugate fill") {
  JobSpec job;
  job.mode = Mode::Exact;
  auto doc = json::parse(R"({"p": 2, "entries":
      [["2", {"re": "1/3", "im": "-1/4"}], [null, "1"]]})");
  apply_sigma_json(doc, job);
  REQUIRE(job.sigma_exact.has_value());
  CHECK_FALSE(job.sigma_float.has_value());
  const auto& m = *job.sigma_exact;
  CHECK(m[0][0] == GaussianRational(2));
  CHECK(m[0][1] == GaussianRational(Rational(1, 3), Rational(-1, 4)));
  CHECK(m[1][0] == m[0][1].conj());
  // the filled matrix passes covariance validation
  CHECK(validate_covariance(m).p() == 2);
}

TEST_CASE("sigma schema: explicit lower triangle is validated, not trusted") {
  JobSpec job;
  job.mode = Mode::Exact;
  auto doc = json::parse(R"([["1", "1/2"], ["1/3", "1"]])");
  apply_sigma_json(doc, job);
  CHECK_THROWS_WITH_AS(validate_covariance(*job.sigma_exact),
                       doctest::Contains("NotHermitian"), error);
}

TEST_CASE("sigma schema: float numbers") {
  JobSpec job;
  job.mode = Mode::Float;
  auto doc = json::parse(R"([[1.5, {"re": 0.25, "im": 1.0}], [null, 2.0]])");
  apply_sigma_json(doc, job);
  REQUIRE(job.sigma_float.has_value());
  CHECK((*job.sigma_float)[0][0] == Complex{1.5, 0.0});
  CHECK((*job.sigma_float)[1][0] == Complex{0.25, -1.0});
}

TEST_CASE("sigma schema errors") {
  JobSpec job;
  job.mode = Mode::Exact;
  auto expect_schema = [&](const char* text, const char* what) {
    auto doc = json::parse(text);
    CHECK_THROWS_WITH_AS(apply_sigma_json(doc, job), doctest::Contains(what), error);
  };
  expect_schema(R"([["1", 0.5], [null, "1"]])", "exact mode needs rational strings");
  expect_schema(R"([["1", "1/2"], [null, 1.5]])", "exact mode");
  expect_schema(R"({"p": 3, "entries": [["1"]]})", "field p");
  expect_schema(R"({"entries": [["1", "0"]]})", "columns");
  expect_schema(R"([["1", null], [null, "1"]])", "upper triangle");
  expect_schema(R"([["1", "one"], [null, "1"]])", "not a rational");
  expect_schema(R"("just a string")", "array or object");
  job.mode = Mode::Float;
  expect_schema(R"([[1.0, "1/2"], [null, 1.0]])", "mixing");
}

TEST_CASE("sigma document can carry alpha") {
  JobSpec job;
  job.mode = Mode::Exact;
  auto doc = json::parse(R"({"p": 1, "entries": [["1"]], "alpha": [2, 2]})");
  apply_sigma_json(doc, job);
  CHECK(job.alpha == std::vector<int>{2, 2});
  // an explicit --alpha wins over the file
  JobSpec job2;
  job2.mode = Mode::Exact;
  job2.alpha = {1, 1};
  apply_sigma_json(doc, job2);
  CHECK(job2.alpha == std::vector<int>{1, 1});
}

TEST_CASE("job constraints") {
  JobSpec job;
  job.alpha = {1, 1};
  job.mode = Mode::Symbolic;
  job.methods = {Method::Mc};
  CHECK_THROWS_WITH_AS(validate_job(job), doctest::Contains("ConstraintError"), error);
  job.methods = {};
  CHECK_THROWS_WITH_AS(validate_job(job), doctest::Contains("ConstraintError"), error);
  job.mode = Mode::Exact;
  job.methods = {Method::Closed};
  CHECK_THROWS_WITH_AS(validate_job(job), doctest::Contains("ConstraintError"), error);
  job.sigma_exact = {{GaussianRational(1)}};
  validate_job(job);  // now fine
}

TEST_CASE("run_job: trivial exact agreement") {
  JobSpec job;
  job.alpha = {1, 1};
  job.sigma_exact = {{GaussianRational(1)}};
  job.methods = {Method::Closed, Method::Recurrence, Method::Permanent};
  auto rep = run_job(job);
  CHECK(rep.exit_code == 0);
  CHECK(rep.mode == "exact");
  CHECK_FALSE(rep.provably_null);
  REQUIRE(rep.methods.size() == 3);
  for (const auto& m : rep.methods) {
    CHECK(m.value.at("re") == "1");
    CHECK(m.value.at("im") == "0");
  }
  REQUIRE(rep.agreements.size() == 3);
  for (const auto& a : rep.agreements) CHECK(a.agree);
  CHECK(rep.index_set_cardinality == 1);
}

TEST_CASE("run_job: corrupted recurrence trips the agreement check") {
  JobSpec job;
  job.alpha = {1, 1};
  job.sigma_exact = {{GaussianRational(1)}};
  job.methods = {Method::Closed, Method::Recurrence};
  job.test_corrupt = true;
  auto rep = run_job(job);
  CHECK(rep.exit_code == 2);
  REQUIRE(rep.agreements.size() == 1);
  CHECK_FALSE(rep.agreements[0].agree);
}

TEST_CASE("run_job: sparse 5x5 empty-neighborhood case") {
  JobSpec job;
  job.alpha = {1, 0, 1, 2, 1, 2, 1, 1, 1, 0};  // n=(1,...,1), m=(0,2,2,1,0)
  job.sigma_exact = five_by_five_sparse_raw();
  job.methods = {Method::Closed, Method::Recurrence, Method::Permanent};
  auto rep = run_job(job);
  CHECK(rep.exit_code == 0);
  CHECK(rep.provably_null);
  CHECK(rep.null_reason == "EmptyNeighborhood");
  CHECK(rep.null_detail == "N,5");
  for (const auto& m : rep.methods) {
    CHECK(m.value.at("re") == "0");
    CHECK(m.value.at("im") == "0");
  }
  for (const auto& a : rep.agreements) CHECK(a.agree);
}

TEST_CASE("run_job: float mc is reported but never drives the exit code") {
  JobSpec job;
  job.alpha = {1, 1};
  job.mode = Mode::Float;
  job.sigma_float = {{Complex{1.0, 0.0}}};
  job.methods = {Method::Closed, Method::Mc};
  job.mc_samples = 4096;
  job.seed = 7;
  auto rep = run_job(job);
  CHECK(rep.exit_code == 0);
  REQUIRE(rep.methods.size() == 2);
  CHECK(rep.methods[1].method == "mc");
  CHECK(rep.methods[1].samples == 4096);
  CHECK(rep.methods[1].std_error_re.has_value());
  CHECK(rep.agreements.empty());  // the only pair involves mc
}

TEST_CASE("report json round trip") {
  JobSpec job;
  job.alpha = {2, 1, 2, 3};
  job.mode = Mode::Symbolic;
  job.methods = {Method::Closed, Method::Recurrence};
  auto rep = run_job(job);
  auto text = report_to_json(rep).dump();
  auto back = report_from_json(json::parse(text));
  CHECK(back == rep);
}

TEST_CASE("cli subprocess: trivial exact run") {
  std::string out;
  int code = run_cli("--alpha 1,1 --sigma-inline \"[[1]]\" --method all --mode exact", &out);
  CHECK(code == 0);
  auto j = json::parse(out);
  CHECK(j.at("exit_code") == 0);
  CHECK(j.at("methods").size() == 3);
  for (const auto& m : j.at("methods")) CHECK(m.at("value").at("re") == "1");
  for (const auto& a : j.at("agreements")) CHECK(a.at("agree") == true);
}

TEST_CASE("cli subprocess: symbolic text output is canonical") {
  std::string out;
  int code = run_cli("--alpha 2,1,2,3 --method closed --mode symbolic --output text", &out);
  CHECK(code == 0);
  CHECK(out.find("12*s12^2*s21*s22 + 12*s11*s12*s22^2") != std::string::npos);
}

TEST_CASE("cli subprocess: exit codes") {
  // 2: engineered disagreement through the hidden corruption hook
  std::string out;
  CHECK(run_cli("--alpha 1,1 --sigma-inline \"[[1]]\" --mode exact --test-corrupt", &out) == 2);
  // 1: input errors
  CHECK(run_cli("--alpha 1,1 --mode exact", nullptr) == 1);            // missing sigma
  CHECK(run_cli("--alpha 1,x --sigma-inline \"[[1]]\"", nullptr) == 1);  // bad alpha
  CHECK(run_cli("--alpha 1,1 --method mc --mode symbolic", nullptr) == 1);
  CHECK(run_cli("--alpha 1,1 --sigma-inline \"[[1,2],[2,1]]\" --mode float", nullptr) == 1);
  CHECK(run_cli("--alpha 1,1 --sigma-inline \"not json\"", nullptr) == 1);
}

TEST_CASE("cli subprocess: float all-methods run with seeded mc") {
  std::string out;
  int code = run_cli("--alpha 1,1,1,1 --sigma-inline "
                     "\"[[2.0,{\\\"re\\\":0.0,\\\"im\\\":1.0}],[null,1.0]]\" "
                     "--mode float --method all --samples 65536 --seed 11 --threads 2",
                     &out);
  CHECK(code == 0);
  auto j = json::parse(out);
  CHECK(j.at("methods").size() == 4);
  // rerun reproduces the mc estimate bit for bit
  std::string out2;
  run_cli("--alpha 1,1,1,1 --sigma-inline "
          "\"[[2.0,{\\\"re\\\":0.0,\\\"im\\\":1.0}],[null,1.0]]\" "
          "--mode float --method all --samples 65536 --seed 11 --threads 1",
          &out2);
  auto j2 = json::parse(out2);
  CHECK(j.at("methods")[3].at("value") == j2.at("methods")[3].at("value"));
}
