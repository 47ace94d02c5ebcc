#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rmt {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool checks_passed = false;
  std::vector<std::string> details;  ///< one line per measured quantity
  double seconds = 0.0;
  double budget_seconds = 0.0;  ///< after hardware scaling
  bool passed() const { return checks_passed && seconds <= budget_seconds; }
};

struct AcceptanceOptions {
  int workers = 0;  ///< 0 = all hardware threads
  std::uint64_t seed = 20240611;
  /// Multiplies every nominal budget; negative selects 8 / hardware threads
  /// (the nominal budgets assume an 8-core machine).
  double budget_scale = -1.0;
};

constexpr int kCriterionCount = 12;

std::string criterion_name(int id);
double criterion_budget_seconds(int id);  ///< nominal
double resolve_budget_scale(const AcceptanceOptions& options);

CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// One line: "PASS|FAIL <id> <name> (<s> s, budget <s> s): details".
std::string format_result(const CriterionResult& result);

/// Runs the given criteria in order, reporting each result as it completes.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace rmt
