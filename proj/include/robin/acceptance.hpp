#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace robin {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  nlohmann::json details = nlohmann::json::object();
  double seconds = 0.0;
};

struct AcceptanceOptions {
  double h = 0.05;   // mesh size for the meshed criteria
  int jobs = 1;      // criteria evaluated concurrently
};

inline constexpr int kCriterionCount = 13;

/// Evaluates one acceptance criterion (1..13). Exceptions are caught and reported as failures.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});
/// All criteria in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});

nlohmann::json to_json(const CriterionResult& r);
/// "[PASS] 3  <title>  (0.12 s)"
std::string summary_line(const CriterionResult& r);

}  // namespace robin
