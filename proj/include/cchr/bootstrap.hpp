#pragma once

#include "cchr/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cchr {

struct BootstrapResult {
  int B = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> estimates;  // successful resamples
  std::vector<double> point;                   // full-sample estimate
  std::vector<double> se;
  std::vector<double> nulls;
  std::vector<double> p_values;
  int failures = 0;
  /// More than 5% of resamples failed.
  bool unreliable = false;
  /// Fewer than two successful resamples; SEs are reported as 0.
  bool degenerate = false;

  bool operator==(const BootstrapResult&) const = default;
};

/// Null values: 1 for nu, 0 otherwise.
std::vector<double> default_nulls(const std::vector<std::string>& names);

/// B^-1 sum_b 1{|est_b - est| > |est - null|}.
double p_value(double estimate, double null_value, std::span<const double> boot);

/// Resamples rows with replacement and refits end to end (weights
/// included). `groups` is resampled alongside for oracle weights.
BootstrapResult bootstrap(const Dataset& data, const FitOptions& options,
                          const FitResult& point, int B, std::uint64_t seed,
                          const std::vector<int>& groups = {},
                          std::optional<std::vector<double>> nulls = std::nullopt);

}  // namespace cchr
