#pragma once

// Cross-check battery behind the `verify` command.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace nekwave {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  /// Measured quantities in a fixed order.
  std::vector<std::pair<std::string, double>> measured;
};

struct VerifyOptions {
  std::size_t modes = 64;
  int mode = 1;
  int series_order = 5;
  int equivalence_order = 4;
  std::size_t kernel_terms = 10000;
  /// Added to every log-kernel value (fault injection).
  double kernel_perturbation = 0.0;
};

CheckResult check_kernel_identity(const VerifyOptions& options);
CheckResult check_eigenvalue_exactness(const VerifyOptions& options);
CheckResult check_frechet_consistency(const VerifyOptions& options);
CheckResult check_symmetry(const VerifyOptions& options);
CheckResult check_series_residual_order(const VerifyOptions& options);
CheckResult check_series_equivalence(const VerifyOptions& options);
CheckResult check_series_vs_newton(const VerifyOptions& options);

std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace nekwave
