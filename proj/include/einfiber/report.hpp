#pragma once

// Structured results for verification checks, with JSON serialization used by
// the command-line driver.  A check passes exactly when its worst residual is
// within the tolerance it was run at (or, for integer/boolean criteria, when
// the criterion holds); `details` carries named scalar diagnostics so that a
// report is self-describing.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace einfiber {

struct CheckReport {
  std::string name;
  bool passed = false;
  double max_residual = 0.0;
  std::int64_t n_samples = 0;
  std::vector<std::pair<std::string, double>> details;

  // Looks up a named diagnostic; throws if the label is absent.
  double detail(const std::string& label) const {
    for (const auto& [key, value] : details) {
      if (key == label) return value;
    }
    throw std::out_of_range("CheckReport::detail: no diagnostic named \"" +
                            label + "\" in check \"" + name + "\"");
  }

  friend bool operator==(const CheckReport& a, const CheckReport& b) {
    return a.name == b.name && a.passed == b.passed &&
           a.max_residual == b.max_residual && a.n_samples == b.n_samples &&
           a.details == b.details;
  }
};

inline nlohmann::ordered_json check_to_json(const CheckReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  j["passed"] = report.passed;
  j["max_residual"] = report.max_residual;
  j["n_samples"] = report.n_samples;
  nlohmann::ordered_json details = nlohmann::ordered_json::array();
  for (const auto& [key, value] : report.details) {
    details.push_back({{"label", key}, {"value", value}});
  }
  j["details"] = std::move(details);
  return j;
}

inline CheckReport check_from_json(const nlohmann::ordered_json& j) {
  CheckReport report;
  report.name = j.at("name").get<std::string>();
  report.passed = j.at("passed").get<bool>();
  report.max_residual = j.at("max_residual").get<double>();
  report.n_samples = j.at("n_samples").get<std::int64_t>();
  for (const auto& entry : j.at("details")) {
    report.details.emplace_back(entry.at("label").get<std::string>(),
                                entry.at("value").get<double>());
  }
  return report;
}

// Assembles the full report document: a header (format version, the exact
// configuration the run used, and a UTC timestamp) followed by the check
// array.  Everything except the timestamp is a pure function of the inputs.
inline nlohmann::ordered_json report_document(
    const nlohmann::ordered_json& config_echo, const std::string& timestamp_utc,
    const std::vector<CheckReport>& checks,
    const std::vector<std::string>& notes = {}) {
  nlohmann::ordered_json doc;
  doc["version"] = "1.0.0";
  doc["config_echo"] = config_echo;
  doc["timestamp_utc"] = timestamp_utc;
  if (!notes.empty()) doc["notes"] = notes;
  doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& check : checks) doc["checks"].push_back(check_to_json(check));
  return doc;
}

inline std::vector<CheckReport> checks_from_document(
    const nlohmann::ordered_json& doc) {
  std::vector<CheckReport> checks;
  for (const auto& entry : doc.at("checks")) {
    checks.push_back(check_from_json(entry));
  }
  return checks;
}

}  // namespace einfiber
