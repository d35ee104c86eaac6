#include "asdal/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

namespace asdal {

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DataError("embedding must have at least one component");
  double sq = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v)) throw DataError("embedding has a non-finite component");
    sq += v * v;
  }
  norm_ = std::sqrt(sq);
  if (!(norm_ > 0.0)) throw DataError("embedding is the zero vector");
}

std::string_view to_string(Label label) noexcept {
  return label == Label::Anomalous ? "anomalous" : "normal";
}

std::string_view to_string(Domain domain) noexcept {
  return domain == Domain::Target ? "target" : "source";
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw ConfigError("cosine_similarity: dimension mismatch (" + std::to_string(a.dim()) +
                      " vs " + std::to_string(b.dim()) + ")");
  }
  const auto av = a.values();
  const auto bv = b.values();
  const double dot = std::inner_product(av.begin(), av.end(), bv.begin(), 0.0);
  return std::clamp(dot / (a.norm() * b.norm()), -1.0, 1.0);
}

std::vector<std::string> machines_of(std::span<const Sample> samples) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& s : samples) {
    if (seen.insert(s.machine).second) out.push_back(s.machine);
  }
  return out;
}

void require_uniform_dimension(std::span<const Embedding> embeddings) {
  if (embeddings.empty()) return;
  const std::size_t d = embeddings.front().dim();
  for (const auto& e : embeddings) {
    if (e.dim() != d) {
      throw DataError("inconsistent embedding dimension: expected " + std::to_string(d) +
                      ", got " + std::to_string(e.dim()));
    }
  }
}

}  // namespace asdal
