#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace cwdyn {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string summary;      // one line, deterministic
  nlohmann::json details;   // deterministic
  std::vector<std::string> failures;
};

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int calibration_budget = 2000;
  int depth = 2;
  std::vector<int> only;  // empty: criteria 1..10
};

const std::vector<std::pair<int, std::string>>& criterion_names();

CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);
// runs the suite twice and compares the deterministic parts
CriterionResult reproducibility(const std::vector<CriterionResult>& first,
                                const std::vector<CriterionResult>& second);

std::string result_line(const CriterionResult& r);
nlohmann::json result_body(const CriterionResult& r);
nlohmann::json failure_manifest(const std::vector<CriterionResult>& results);

}  // namespace cwdyn
