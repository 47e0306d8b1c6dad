#pragma once

#include <string>
#include <vector>

namespace fvvisc::cli {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariants that need no nonlinear solve: LSQ linear exactness, Roe
/// consistency, free-stream preservation, closure and volume partition,
/// strategy equivalences, arithmetic boundedness and mu(1) = M/Re.
std::vector<CheckResult> run_property_checks();

}  // namespace fvvisc::cli
