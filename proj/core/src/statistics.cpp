#include "asdal/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "asdal/types.hpp"

namespace asdal {

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty collection");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double harmonic_mean(std::span<const double> values) {
  if (values.empty()) throw ConfigError("harmonic mean of an empty collection");
  double inv = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw ConfigError("harmonic mean requires strictly positive values");
    inv += 1.0 / v;
  }
  return static_cast<double>(values.size()) / inv;
}

double arithmetic_mean(std::span<const double> values) {
  if (values.empty()) throw ConfigError("mean of an empty collection");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

MeanInterval ci95(std::span<const double> values) {
  MeanInterval out;
  out.mean = arithmetic_mean(values);
  const std::size_t n = values.size();
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.half_width = 1.96 * sd / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace asdal
