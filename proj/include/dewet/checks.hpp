#pragma once

#include <string>
#include <vector>

#include "dewet/config.hpp"

namespace dewet {

struct SuiteResult {
  std::string name;
  bool passed = false;
  bool informational = false;  ///< reported but never fails the suite
  std::string detail;
};

/// Property suite behind `validate`.
std::vector<SuiteResult> run_property_suite(const SimConfig& cfg);

/// Fixed-width pass/fail table.
std::string format_suite(const std::vector<SuiteResult>& results);

/// True when no gated suite failed.
bool suite_ok(const std::vector<SuiteResult>& results);

}  // namespace dewet
