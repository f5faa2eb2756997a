#pragma once

#include <string>
#include <vector>

namespace localis {

/// One executed property: the measured residual against its pinned
/// threshold.  Residual semantics are property-specific (max deviation,
/// ratio to a bound, ...) but always "smaller is better".
struct PropertyResult {
  std::string suite;
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Runs a named suite with fixed seeds: "group", "representation",
/// "localization", "synthesis", or "all" (concatenation, 15 properties).
/// Unknown names throw invalid_argument.
std::vector<PropertyResult> run_suite(const std::string& suite);

std::string verify_report_json(const std::vector<PropertyResult>& results);

}  // namespace localis
