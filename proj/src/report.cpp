#include "robin/report.hpp"

#include <algorithm>

namespace robin {

Assertion& ExperimentReport::check(std::string name, double lhs, double rhs, double tolerance, bool informational) {
  assertions.push_back({std::move(name), lhs, rhs, tolerance, informational});
  return assertions.back();
}

bool ExperimentReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.informational || a.passed(); });
}

const Assertion* ExperimentReport::find(const std::string& name) const {
  for (const auto& a : assertions)
    if (a.name == name) return &a;
  return nullptr;
}

nlohmann::json to_json(const Assertion& a) {
  return {{"name", a.name},           {"lhs", a.lhs},       {"rhs", a.rhs},
          {"tolerance", a.tolerance}, {"margin", a.margin()}, {"passed", a.passed()},
          {"informational", a.informational}};
}

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["inputs"] = r.inputs;
  j["quantities"] = r.quantities;
  j["assertions"] = nlohmann::json::array();
  for (const auto& a : r.assertions) j["assertions"].push_back(to_json(a));
  if (!r.extra.empty()) j["extra"] = r.extra;
  j["passed"] = r.passed();
  j["wall_time"] = r.wall_time;
  j["tool_version"] = kToolVersion;
  return j;
}

}  // namespace robin
