// Command-line front-end: evaluate moments of the centered complex
// multivariate normal by the selected methods and report agreement.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cmnd/job.hpp"

namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("CMND_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

}  // namespace

namespace cmnd {

JobSpec parse_job(int argc, const char* const* argv) {
  CLI::App app{"Moments of the centered complex multivariate normal distribution"};

  std::string alpha_text, sigma_path, sigma_inline;
  std::string method = "all", mode = "exact", output = "json", prune = "off";
  JobSpec job;
  job.threads = default_threads();

  app.add_option("--alpha", alpha_text, "Exponents n1,m1,n2,m2,...");
  app.add_option("--sigma", sigma_path, "Path to a covariance JSON file");
  app.add_option("--sigma-inline", sigma_inline, "Covariance JSON given inline");
  app.add_option("--method", method)->check(CLI::IsMember({"closed", "recurrence", "permanent", "mc", "all"}));
  app.add_option("--mode", mode)->check(CLI::IsMember({"exact", "float", "symbolic"}));
  app.add_option("--samples", job.mc_samples, "Monte Carlo sample count");
  app.add_option("--seed", job.seed, "Monte Carlo seed");
  app.add_option("--output", output)->check(CLI::IsMember({"json", "text"}));
  app.add_option("--sparse-prune", prune)->check(CLI::IsMember({"on", "off"}));
  app.add_option("--threads", job.threads, "Worker thread cap (default: CMND_THREADS or hardware)");
  app.add_option("--permanent-cap", job.permanent_cap, "Max expanded dimension for the permanent");
  app.add_flag("--test-corrupt", job.test_corrupt)->group("");  // test-only hook

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp& e) {
    std::exit(app.exit(e));
  } catch (const CLI::ParseError& e) {
    throw error(errc::parse_error, e.what());
  }

  job.mode = mode == "exact" ? Mode::Exact : mode == "float" ? Mode::Float : Mode::Symbolic;
  job.output_json = output == "json";
  job.sparse_prune = prune == "on";

  if (method == "all") {
    job.methods = {Method::Closed, Method::Recurrence, Method::Permanent};
    if (job.mode == Mode::Float) job.methods.push_back(Method::Mc);
  } else if (method == "closed") {
    job.methods = {Method::Closed};
  } else if (method == "recurrence") {
    job.methods = {Method::Recurrence};
  } else if (method == "permanent") {
    job.methods = {Method::Permanent};
  } else {
    job.methods = {Method::Mc};
  }

  if (!alpha_text.empty()) job.alpha = parse_alpha(alpha_text);

  if (!sigma_path.empty() && !sigma_inline.empty())
    throw error(errc::constraint_error, "give either --sigma or --sigma-inline, not both");
  nlohmann::json doc;
  if (!sigma_path.empty()) {
    std::ifstream in(sigma_path);
    if (!in) throw error(errc::parse_error, "cannot open " + sigma_path);
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw error(errc::parse_error, std::string("sigma file: ") + e.what());
    }
  } else if (!sigma_inline.empty()) {
    try {
      doc = nlohmann::json::parse(sigma_inline);
    } catch (const nlohmann::json::exception& e) {
      throw error(errc::parse_error, std::string("sigma inline: ") + e.what());
    }
  }
  if (!doc.is_null()) apply_sigma_json(doc, job);

  validate_job(job);
  return job;
}

}  // namespace cmnd

int main(int argc, char** argv) {
  try {
    cmnd::JobSpec job = cmnd::parse_job(argc, argv);
    cmnd::Report rep = cmnd::run_job(job);
    if (job.output_json)
      std::cout << cmnd::report_to_json(rep).dump(2) << "\n";
    else
      std::cout << cmnd::render_text(rep);
    return rep.exit_code;
  } catch (const cmnd::error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
