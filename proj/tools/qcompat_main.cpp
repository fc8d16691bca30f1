// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qcompat/errors.hpp"
#include "qcompat/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) qcompat::fail(qcompat::ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json parse_json(const std::string& bytes, const std::string& path) {
  try {
    return nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    // e.what() carries the byte position of the failure.
    qcompat::fail(qcompat::ErrorCode::ParseError, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compatibility, concatenation preorder and post-processing "
               "oracles for finite-dimensional channels and POVMs"};
  app.require_subcommand(1);

  std::string problem_path, report_path, out_path;
  double tol = -1.0;
  long long seed = -1;
  long long max_iters = -1;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "Answer the query in a problem file");
  run->add_option("problem", problem_path, "Problem JSON file")->required();
  run->add_option("--out", out_path, "Write the report here instead of stdout");
  run->add_option("--tol", tol, "Feasibility tolerance override");
  run->add_option("--seed", seed, "Seed override");
  run->add_option("--max-iters", max_iters, "Solver iteration cap override");
  run->add_flag("--quiet", quiet, "Suppress the verdict summary on stderr");

  CLI::App* verify = app.add_subcommand("verify",
                                        "Re-check a report's certificates "
                                        "against its problem file (no solver)");
  verify->add_option("report", report_path, "Report JSON file")->required();
  verify->add_option("problem", problem_path, "Problem JSON file")->required();
  verify->add_flag("--quiet", quiet, "Suppress the result line on stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const std::string bytes = read_file(problem_path);
      const nlohmann::json problem = parse_json(bytes, problem_path);
      nlohmann::json overrides = nlohmann::json::object();
      if (tol > 0) overrides["feas_tol"] = tol;
      if (seed >= 0) overrides["seed"] = static_cast<std::uint64_t>(seed);
      if (max_iters > 0) overrides["max_iters"] = max_iters;

      const qcompat::RunOutcome outcome =
          qcompat::run_problem(problem, bytes, overrides);
      const std::string text = outcome.report.dump(2);
      if (out_path.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) qcompat::fail(qcompat::ErrorCode::ParseError,
                                "cannot write " + out_path);
        out << text << "\n";
      }
      if (!quiet)
        std::cerr << "verdict: " << outcome.report["verdict"].get<std::string>()
                  << "\n";
      return outcome.exit_code;
    }

    const std::string report_bytes = read_file(report_path);
    const std::string problem_bytes = read_file(problem_path);
    const nlohmann::json report = parse_json(report_bytes, report_path);
    const nlohmann::json problem = parse_json(problem_bytes, problem_path);
    std::string message;
    const int rc =
        qcompat::verify_report(report, problem, problem_bytes, &message);
    if (!quiet) std::cerr << message << "\n";
    return rc;
  } catch (const qcompat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
