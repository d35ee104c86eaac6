#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "asdal/scoring.hpp"
#include "asdal/types.hpp"

namespace asdal {

struct KMeansConfig {
  std::size_t k = 32;
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;  // on relative objective decrease
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<Embedding> centers;
  std::vector<std::size_t> assignment;  // cluster index per input point
  // Within-cluster sum of squared distances after each assignment step.
  std::vector<double> objective_history;
  std::size_t iterations = 0;
};

/// Lloyd's k-means with Euclidean distance and D^2-weighted seeding.
///
/// The first center is drawn uniformly with the configured seed; each
/// further center is drawn with probability proportional to its squared
/// distance from the nearest chosen center. A cluster that empties out is
/// re-seeded with the point farthest from its current center, so exactly k
/// centers are always returned. Stops after max_iterations or when the
/// relative objective decrease drops below tolerance.
///
/// Throws ConfigError for empty input, k == 0, k > |points| or tolerance <= 0.
[[nodiscard]] KMeansResult kmeans_detailed(std::span<const Embedding> points,
                                           const KMeansConfig& cfg);

[[nodiscard]] std::vector<Embedding> kmeans(std::span<const Embedding> points,
                                            const KMeansConfig& cfg);

/// k centers of the source normals followed by every target normal.
/// The anomalous set starts empty.
[[nodiscard]] ReferenceSets build_initial_reference(std::span<const Embedding> source_normals,
                                                    std::span<const Embedding> target_normals,
                                                    const KMeansConfig& cfg);

}  // namespace asdal
