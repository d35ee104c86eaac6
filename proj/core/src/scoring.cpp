#include "asdal/scoring.hpp"

#include <string>

namespace asdal {

ReferenceSets::ReferenceSets(std::vector<Embedding> normal, std::vector<Embedding> anomalous)
    : normal_(std::move(normal)), anomalous_(std::move(anomalous)) {
  if (normal_.empty()) throw ConfigError("reference normal set must not be empty");
  const std::size_t d = normal_.front().dim();
  auto check = [d](const std::vector<Embedding>& set) {
    for (const auto& e : set) {
      if (e.dim() != d) throw ConfigError("reference sets mix embedding dimensions");
    }
  };
  check(normal_);
  check(anomalous_);
}

void ReferenceSets::add_member(const Embedding& e, Label y) {
  if (e.dim() != dim()) {
    throw ConfigError("add_member: dimension " + std::to_string(e.dim()) +
                      " does not match reference dimension " + std::to_string(dim()));
  }
  if (y == Label::Anomalous) {
    anomalous_.push_back(e);
  } else {
    normal_.push_back(e);
  }
}

void validate(const ScorerConfig& cfg) {
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
}

double max_similarity(const Embedding& e, std::span<const Embedding> members) {
  if (members.empty()) throw ConfigError("similarity against an empty embedding set");
  double best = cosine_similarity(e, members.front());
  for (std::size_t i = 1; i < members.size(); ++i) {
    const double c = cosine_similarity(e, members[i]);
    if (c > best) best = c;
  }
  return best;
}

double base_score(const Embedding& e, std::span<const Embedding> normals) {
  return 1.0 - max_similarity(e, normals);
}

double base_score(const Embedding& e, const ReferenceSets& refs) {
  return base_score(e, refs.normal());
}

double anomaly_similarity(const Embedding& e, const ReferenceSets& refs) {
  if (refs.anomalous().empty()) throw ConfigError("anomalous reference set is empty");
  return max_similarity(e, refs.anomalous());
}

double augmented_score(const Embedding& e, const ReferenceSets& refs, const ScorerConfig& cfg) {
  const double a = base_score(e, refs);
  if (refs.anomalous().empty()) return a;
  return (1.0 - cfg.gamma) * a + cfg.gamma * anomaly_similarity(e, refs);
}

}  // namespace asdal
