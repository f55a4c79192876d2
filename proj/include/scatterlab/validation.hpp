#pragma once

#include <functional>
#include <string>
#include <vector>

/// The acceptance suite, shared by `scatterlab validate` and the acceptance
/// test binary.
namespace scatterlab::validation {

enum class Level { Quick, Full };

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Measured values, one "name=value" item per entry.
  std::vector<std::string> measurements;
  double seconds = 0.0;
  double time_limit = 0.0;
};

inline constexpr int kCriterionCount = 12;

/// Runs one criterion (1-based). Unexpected exceptions count as failures.
CriterionResult run_criterion(int id, Level level);

/// Runs the criteria in order, calling `report` after each one.
std::vector<CriterionResult> run_all(Level level, const std::function<void(const CriterionResult&)>& report = {});

/// "PASS [3] title (1.2 s): a=1, b=2"
std::string format(const CriterionResult& r);

}  // namespace scatterlab::validation
