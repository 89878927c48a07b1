#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aqrm {

struct CheckResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// Internal-consistency checks against independent references. `quick` runs
/// the subset that finishes in a few seconds.
std::vector<CheckResult> run_validation(bool quick);

/// Prints one PASS/FAIL line per check; returns 0 when all pass, 2 otherwise.
int validate_main(bool quick, std::ostream& out);

}  // namespace aqrm
