#pragma once

#include <string>
#include <vector>

namespace wqed {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

std::vector<std::string> validation_suites();  // algebra-oracle, weak-drive, convergence, cross-method

// Runs one suite, or every suite for "all". Unknown names throw ConfigError.
std::vector<CheckResult> run_validation(const std::string& suite);

std::string format_report(const std::vector<CheckResult>& results);

}  // namespace wqed
