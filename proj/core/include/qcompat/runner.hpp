// This code is licensed under the Apache License, Version 2.0. You may
// obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.

#ifndef QCOMPAT_RUNNER_HPP
#define QCOMPAT_RUNNER_HPP

#include <string>
#include <string_view>

#include "qcompat/serialize.hpp"

namespace qcompat {

inline constexpr const char* kToolName = "qcompat";
inline constexpr const char* kToolVersion = "0.1.0";

// Non-cryptographic content fingerprint used to tie reports to their problem
// files.
std::string fnv1a64_hex(std::string_view bytes);

struct RunOptions {
  FeasibilityOptions feas;
  std::uint64_t seed = 1;
};

// problem["options"] merged with CLI overrides (overrides win).
RunOptions resolve_options(const nlohmann::json& problem,
                           const nlohmann::json& cli_overrides);

struct RunOutcome {
  nlohmann::json report;
  int exit_code = 0;  // 0 = answered (yes or no), 2 = undecided
};

// Dispatches the problem's query and assembles the report. Input errors are
// raised as qcompat::Error (mapped to exit code 1 by the CLI).
RunOutcome run_problem(const nlohmann::json& problem,
                       const std::string& problem_bytes,
                       const nlohmann::json& cli_overrides = nlohmann::json::object());

// Recomputes every certificate residual in the report from the certificates
// and the problem objects alone; the feasibility solver is never invoked.
// Returns 0 when all residuals meet the recorded tolerances, 1 otherwise.
int verify_report(const nlohmann::json& report, const nlohmann::json& problem,
                  const std::string& problem_bytes, std::string* message);

}  // namespace qcompat

#endif
