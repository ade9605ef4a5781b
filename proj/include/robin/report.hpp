#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace robin {

inline constexpr const char* kToolVersion = "1.0.0";

/// One checked inequality: holds when lhs <= rhs + tolerance.
struct Assertion {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool informational = false;  // recorded, but does not affect the verdict

  double margin() const { return rhs - lhs; }
  bool passed() const { return lhs <= rhs + tolerance; }
};

/// Serialized record of one verification experiment.
struct ExperimentReport {
  std::string id;
  nlohmann::json inputs = nlohmann::json::object();
  std::map<std::string, double> quantities;
  std::vector<Assertion> assertions;
  nlohmann::json extra = nlohmann::json::object();
  double wall_time = 0.0;

  void set(const std::string& name, double value) { quantities[name] = value; }
  Assertion& check(std::string name, double lhs, double rhs, double tolerance, bool informational = false);
  /// All non-informational assertions hold.
  bool passed() const;
  const Assertion* find(const std::string& name) const;
};

nlohmann::json to_json(const Assertion& a);
nlohmann::json to_json(const ExperimentReport& r);

}  // namespace robin
