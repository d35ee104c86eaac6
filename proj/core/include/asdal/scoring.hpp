#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "asdal/types.hpp"

namespace asdal {

/// The scoring backend's state: reference normal embeddings and labeled
/// anomalous embeddings. Insertion order is preserved; duplicates allowed.
class ReferenceSets {
 public:
  /// Throws ConfigError if `normal` is empty or dimensions disagree.
  explicit ReferenceSets(std::vector<Embedding> normal,
                         std::vector<Embedding> anomalous = {});

  [[nodiscard]] std::span<const Embedding> normal() const noexcept { return normal_; }
  [[nodiscard]] std::span<const Embedding> anomalous() const noexcept { return anomalous_; }
  [[nodiscard]] std::size_t dim() const noexcept { return normal_.front().dim(); }

  /// Appends `e` to the anomalous set if `y` is Anomalous, to the normal set
  /// otherwise. Existing members are never touched.
  void add_member(const Embedding& e, Label y);

 private:
  std::vector<Embedding> normal_;
  std::vector<Embedding> anomalous_;
};

struct ScorerConfig {
  double gamma = 0.5;  // blend weight of the anomalous-set similarity
};

void validate(const ScorerConfig& cfg);

/// max over members of cosine_similarity(e, member).
/// Throws ConfigError if `members` is empty or a dimension disagrees.
[[nodiscard]] double max_similarity(const Embedding& e, std::span<const Embedding> members);

/// 1 - max cosine similarity to the reference normals. In [0, 2].
[[nodiscard]] double base_score(const Embedding& e, std::span<const Embedding> normals);
[[nodiscard]] double base_score(const Embedding& e, const ReferenceSets& refs);

/// Max cosine similarity to the labeled anomalies. Throws ConfigError when
/// the anomalous set is empty.
[[nodiscard]] double anomaly_similarity(const Embedding& e, const ReferenceSets& refs);

/// base_score when no anomalies are known, otherwise
/// (1 - gamma) * base_score + gamma * anomaly_similarity.
[[nodiscard]] double augmented_score(const Embedding& e, const ReferenceSets& refs,
                                     const ScorerConfig& cfg);

}  // namespace asdal
