#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "asdal/types.hpp"

namespace asdal {

/// Synthetic embedding benchmark. Per machine the generator draws a
/// source-normal cluster, a target-normal cluster shifted away from it, and
/// several anomaly clusters at a larger shift (the first one leaning toward
/// the target cluster). Anomaly shift directions share a common "fault"
/// component whose weight is `anomaly_coherence`: the cosine between any two
/// anomaly directions equals it. Optionally the test stream also carries an
/// "unseen" normal cluster that never appears in training. Every row is
/// normalised to unit length.
///
/// Cluster members are center + N(0, (spread^2 / dim) I) before
/// normalisation, so `spread` is the expected noise radius.
struct SynthConfig {
  std::size_t dim = 128;
  std::size_t machines = 7;

  std::size_t source_train = 990;
  std::size_t target_train = 10;
  std::size_t test_normal_source = 50;
  std::size_t test_normal_target = 50;
  std::size_t test_anomalous = 100;
  std::size_t test_normal_unseen = 0;  // extra source-domain test normals

  std::size_t anomaly_clusters = 3;
  double spread = 1.0;
  double target_shift = 0.4;
  double anomaly_shift = 0.5;
  double unseen_shift = 0.6;
  double anomaly_coherence = 0.5;

  std::uint64_t seed = 0;
};

/// Throws ConfigError for zero counts/dim, fewer than two anomaly clusters,
/// non-positive spread, coherence outside [0, 1), or shifts not satisfying
/// anomaly_shift > target_shift >= 0.
void validate(const SynthConfig& cfg);

struct SynthDataset {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

[[nodiscard]] SynthDataset generate(const SynthConfig& cfg);

}  // namespace asdal
