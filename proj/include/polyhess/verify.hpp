#pragma once

// Built-in invariant suites behind `polyhess verify`.  Every check is seeded and
// produces the same table for the same seed regardless of the job count.

#include <cstdint>
#include <string>
#include <vector>

#include "polyhess/grid.hpp"

namespace polyhess {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured error, order, or count
  double tolerance = 0.0;  // threshold `value` is compared against
  std::string detail;
};

struct VerifyOptions {
  std::vector<std::string> suites;  // empty = all
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// "algebra", "exponents", "grid", "energy".
const std::vector<std::string>& suite_names();

/// Throws ConfigError for an unknown suite name.
std::vector<CheckResult> run_verify(const VerifyOptions& opt);

/// Fixed-width table, one row per check, followed by a summary line.
std::string format_table(const std::vector<CheckResult>& results);

/// Centred bump of radius 0.45 * min extent and unit amplitude, positive.
ScalarField standard_bump(const BoxDomain& d, int ghost_width);

/// Observed order log(|e_coarse| / |e_fine|) / log(h_coarse / h_fine).
double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine);

}  // namespace polyhess
