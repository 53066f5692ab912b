#pragma once

#include <string>
#include <vector>

#include "maisac/scenario.hpp"

namespace maisac {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Structural invariants on the configured scenario (placements, channels,
/// one SCA solve, swarm monotonicity, serialization round trips).
std::vector<CheckResult> run_invariant_checks(const Scenario& s);

/// Randomized and exhaustive oracles: dense channel products, receiver
/// optimality against random filters, bound validity, subgradient
/// inequality, and swarm vs. exhaustive search on a reduced grid.
std::vector<CheckResult> run_oracle_checks(const Scenario& s);

}  // namespace maisac
