#pragma once

// Cross-validation battery: closed forms against Monte-Carlo, quadrature
// oracles and each other. Each check reports pass/fail, what it measured and
// how long it took.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fsorf {

struct CheckResult {
  int id = 0;             // 1..8 for the acceptance criteria, 0 for auxiliary checks
  std::string name;
  bool passed = false;
  bool informational = false;  // reported, never gates
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  long long mc_samples = 10000000;  // per grid point, cross-validation checks
  long long ks_samples = 100000;
  std::uint64_t seed = 20240601;
  int threads = 0;
  /// Negative control: perturbs b_1 before the constant-consistency check.
  bool corrupt_bk = false;
  /// Restrict to these criterion ids (empty: all). 0 selects the auxiliary checks.
  std::vector<int> only;
  /// Called as each result becomes available.
  std::function<void(const CheckResult&)> on_result;
};

std::vector<CheckResult> run_validation(const SuiteOptions& options);

/// "PASS [3] name (12.3 s): detail"; INFO for informational results.
std::string format_check(const CheckResult& r);

}  // namespace fsorf
