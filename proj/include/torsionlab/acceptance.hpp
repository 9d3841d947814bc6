#pragma once

#include <string>
#include <vector>

namespace torsionlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Worst observed deviation and its tolerance, or the error message.
  std::string detail;
};

inline constexpr int kCriterionCount = 15;

/// One acceptance criterion, 1-based. Exceptions become failures.
CriterionResult run_criterion(int id);

std::vector<CriterionResult> run_acceptance();

}  // namespace torsionlab
