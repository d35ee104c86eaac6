#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "asdal/scoring.hpp"
#include "asdal/strategies.hpp"
#include "asdal/types.hpp"

namespace asdal {

/// Source of ground-truth labels for queried samples. This is the only
/// channel through which the engine learns labels.
class Oracle {
 public:
  virtual ~Oracle() = default;
  /// Throws on failure; the engine then aborts the trial.
  virtual Label query(const std::string& sample_id) = 0;
};

/// Answers from the labels stored in a dataset.
class DatasetOracle final : public Oracle {
 public:
  explicit DatasetOracle(std::span<const Sample> samples);
  Label query(const std::string& sample_id) override;
  [[nodiscard]] std::size_t queries() const noexcept { return queries_; }

 private:
  std::unordered_map<std::string, Label> labels_;
  std::size_t queries_ = 0;
};

struct EngineConfig {
  ScorerConfig scorer;
  StrategySpec strategy;
  double initial_quantile = 0.9;
  // Operator-facing decision threshold; reported, never consulted.
  std::optional<double> decision_threshold;
};

void validate(const EngineConfig& cfg);

struct DecisionRecord {
  std::string sample_id;
  std::size_t arrival_index = 0;
  double score = 0.0;  // augmented score before any update from this sample
  bool queried = false;
  std::optional<Label> oracle_label;
  Label truth_label = Label::Normal;  // evaluation only
  Domain domain = Domain::Source;
  std::string machine;

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

struct TrialLog {
  std::vector<DecisionRecord> records;
  std::size_t final_normal = 0;
  std::size_t final_anomalous = 0;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t query_count() const noexcept;
  /// queried / records; 0 for an empty log.
  [[nodiscard]] double query_fraction() const noexcept;

  friend bool operator==(const TrialLog&, const TrialLog&) = default;
};

/// Initial labeling threshold: the configured quantile of `pool_scores`.
/// A zero result is replaced by the smallest positive score, or 1e-6 if
/// there is none, so multiplicative updates can move it.
[[nodiscard]] double initial_threshold(std::span<const double> pool_scores, double q);

/// Prequential active-learning loop over one stream.
///
/// Each arriving sample is scored with the current reference sets, the
/// strategy decides whether to query, and a queried sample's label is
/// folded into the reference sets (and, for normals, into the score pool).
/// The recorded score is always the pre-update score.
class StreamEngine {
 public:
  /// Scores `labeled_normals` against `refs` to form the score pool, derives
  /// the labeling threshold from it and builds the configured strategy.
  /// Throws ConfigError if `labeled_normals` is empty.
  StreamEngine(ReferenceSets refs, std::span<const Embedding> labeled_normals,
               const EngineConfig& cfg, std::uint64_t seed);

  DecisionRecord process_sample(const Sample& x, Oracle& oracle);

  /// Runs process_sample over `samples` in order. Throws ConfigError for an
  /// empty stream and TrialError when the oracle fails.
  TrialLog run_stream(std::span<const Sample> samples, Oracle& oracle);

  [[nodiscard]] const ReferenceSets& references() const noexcept { return refs_; }
  [[nodiscard]] std::span<const double> score_pool() const noexcept { return pool_; }
  [[nodiscard]] double initial_labeling_threshold() const noexcept { return threshold_; }
  [[nodiscard]] const QueryStrategy& strategy() const noexcept { return *strategy_; }

  /// Test hook: when disabled, queried labels are recorded but not applied.
  void set_updates_enabled(bool enabled) noexcept { updates_enabled_ = enabled; }

 private:
  ReferenceSets refs_;
  std::vector<double> pool_;
  EngineConfig cfg_;
  double threshold_ = 0.0;
  std::unique_ptr<QueryStrategy> strategy_;
  std::size_t arrivals_ = 0;
  std::uint64_t seed_;
  bool updates_enabled_ = true;
};

}  // namespace asdal
