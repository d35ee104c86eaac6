#pragma once

#include <optional>
#include <span>

namespace asdal {

/// Linear-interpolation empirical quantile. For sorted v[0..n-1] and
/// p = q*(n-1) returns v[floor p] + frac(p) * (v[ceil p] - v[floor p]).
/// Throws ConfigError for empty input or q outside [0, 1].
[[nodiscard]] double quantile(std::span<const double> values, double q);

/// n / sum(1/x). Throws ConfigError on empty input or any x <= 0.
[[nodiscard]] double harmonic_mean(std::span<const double> values);

[[nodiscard]] double arithmetic_mean(std::span<const double> values);

struct MeanInterval {
  double mean = 0.0;
  std::optional<double> half_width;  // absent for fewer than two values
};

/// Mean and 95% normal-approximation half-width 1.96 * sd / sqrt(n),
/// sd being the sample (n-1) standard deviation.
[[nodiscard]] MeanInterval ci95(std::span<const double> values);

}  // namespace asdal
