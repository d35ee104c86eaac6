#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace asdal {

// Error hierarchy. The CLI maps each class onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument (usage error).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A single trial could not complete (oracle failure and the like).
class TrialError : public Error {
 public:
  using Error::Error;
};

/// Fixed-dimension real vector produced by an external encoder.
///
/// Immutable once constructed. Construction rejects empty vectors,
/// non-finite components and the zero vector, so every Embedding in the
/// system has a well-defined cosine similarity with every other Embedding
/// of the same dimension. The Euclidean norm is cached.
class Embedding {
 public:
  explicit Embedding(std::vector<double> values);
  Embedding(std::initializer_list<double> values)
      : Embedding(std::vector<double>(values)) {}

  [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
  [[nodiscard]] double norm() const noexcept { return norm_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

  friend bool operator==(const Embedding& a, const Embedding& b) noexcept {
    return a.values_ == b.values_;
  }

 private:
  std::vector<double> values_;
  double norm_ = 0.0;
};

enum class Label : int { Normal = 0, Anomalous = 1 };
enum class Domain { Source, Target };

[[nodiscard]] std::string_view to_string(Label label) noexcept;
[[nodiscard]] std::string_view to_string(Domain domain) noexcept;

struct Sample {
  std::string id;
  std::string machine;
  Domain domain = Domain::Source;
  Label label = Label::Normal;  // ground truth; only the oracle hands it out
  Embedding embedding;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// <a,b> / (|a||b|), clamped to [-1, 1].
/// Throws ConfigError on dimension mismatch.
[[nodiscard]] double cosine_similarity(const Embedding& a, const Embedding& b);

/// Distinct machine identifiers in first-appearance order.
[[nodiscard]] std::vector<std::string> machines_of(std::span<const Sample> samples);

/// Throws DataError unless every embedding shares one dimension.
void require_uniform_dimension(std::span<const Embedding> embeddings);

}  // namespace asdal
