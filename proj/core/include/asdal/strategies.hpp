#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asdal/random.hpp"
#include "asdal/scoring.hpp"
#include "asdal/types.hpp"

namespace asdal {

/// Moving-average estimate of the spent labeling budget.
class BudgetTracker {
 public:
  BudgetTracker(double budget, std::size_t window);

  /// spent <- ((w - 1) * spent + [queried]) / w. Call once per decision.
  void update(bool queried) noexcept;

  [[nodiscard]] double budget() const noexcept { return budget_; }
  [[nodiscard]] double spent() const noexcept { return spent_; }
  [[nodiscard]] std::size_t window() const noexcept { return window_; }

 private:
  double budget_;
  double spent_ = 0.0;
  std::size_t window_;
};

/// A stream query policy. One instance per trial; not thread-safe.
class QueryStrategy {
 public:
  virtual ~QueryStrategy() = default;

  /// Decide whether to request a label for the arriving sample whose
  /// embedding is `e` and whose current anomaly score is `score`.
  virtual bool decide(const Embedding& e, double score) = 0;

  /// Feedback after the oracle answered a query.
  virtual void observe_label(const Embedding& /*e*/, Label /*y*/) {}

  [[nodiscard]] virtual std::string_view name() const noexcept = 0;
  [[nodiscard]] virtual double spent_budget() const noexcept = 0;
};

// ---------------------------------------------------------------------------
// Hybrid certainty-based strategy.

struct HybridConfig {
  double budget = 0.1;
  double alpha = 0.01;       // multiplicative threshold adjustment
  std::size_t window = 200;  // budget moving-average window
  // When set, a fixed mixing threshold replaces the adaptive random gate:
  // with eta ~ U(0,1), eta > upsilon selects least-certainty (query iff
  // score > h), otherwise the sample is queried with probability budget.
  std::optional<double> upsilon;
};

void validate(const HybridConfig& cfg);

class HybridStrategy final : public QueryStrategy {
 public:
  /// `threshold` is the initial labeling threshold h (> 0).
  HybridStrategy(const HybridConfig& cfg, double threshold, std::uint64_t seed);

  bool decide(const Embedding& /*e*/, double score) override { return decide(score); }

  /// While spent < budget: query if score > h, otherwise draw
  /// eta ~ U(0,1) and query iff eta > spent/budget; then h *= (1 + alpha).
  /// Once spent >= budget: h *= (1 - alpha) and do not query.
  /// The spent-budget tracker is updated after every call.
  bool decide(double score);

  [[nodiscard]] std::string_view name() const noexcept override { return "hybrid"; }
  [[nodiscard]] double spent_budget() const noexcept override { return tracker_.spent(); }
  [[nodiscard]] double threshold() const noexcept { return threshold_; }
  [[nodiscard]] const BudgetTracker& tracker() const noexcept { return tracker_; }

 private:
  HybridConfig cfg_;
  double threshold_;
  BudgetTracker tracker_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Random baseline: query with probability `budget`, independent of input.

class RandomStrategy final : public QueryStrategy {
 public:
  RandomStrategy(double budget, std::size_t window, std::uint64_t seed);

  bool decide(const Embedding& /*e*/, double /*score*/) override { return decide(); }
  bool decide();

  [[nodiscard]] std::string_view name() const noexcept override { return "random"; }
  [[nodiscard]] double spent_budget() const noexcept override { return tracker_.spent(); }

 private:
  BudgetTracker tracker_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Query-by-committee baseline with a balancing incremental quantile filter.

/// Mean absolute deviation of committee scores from their mean.
/// Throws ConfigError for fewer than two scores.
[[nodiscard]] double qbc_uncertainty(std::span<const double> member_scores);

struct QbcConfig {
  double budget = 0.1;
  std::size_t committee_size = 10;
  double inclusion_rate = 0.9;
  std::size_t quantile_window = 200;  // recent uncertainties kept by the filter
  std::size_t window = 200;           // budget moving-average window
  // Resample every member set from the whole labeled normal pool after each
  // normal label instead of extending the sets incrementally.
  bool rebuild_committee = false;
};

void validate(const QbcConfig& cfg);

class QbcStrategy final : public QueryStrategy {
 public:
  /// Each member set is an independent Bernoulli(inclusion_rate) subsample
  /// of `labeled_normals`; a member that draws nothing keeps one uniformly
  /// chosen element so no set is ever empty.
  QbcStrategy(const QbcConfig& cfg, std::span<const Embedding> labeled_normals,
              std::uint64_t seed);

  bool decide(const Embedding& e, double score) override;
  void observe_label(const Embedding& e, Label y) override;

  /// Adds a newly labeled normal to each member set with probability
  /// inclusion_rate (or rebuilds all sets when rebuild_committee is on).
  void update_committee(const Embedding& e);

  [[nodiscard]] std::string_view name() const noexcept override { return "qbc"; }
  [[nodiscard]] double spent_budget() const noexcept override { return tracker_.spent(); }

  [[nodiscard]] double last_uncertainty() const noexcept { return last_uncertainty_; }
  [[nodiscard]] double balance() const noexcept { return balance_; }
  [[nodiscard]] const std::vector<std::vector<Embedding>>& members() const noexcept {
    return members_;
  }
  [[nodiscard]] const std::deque<double>& uncertainty_window() const noexcept {
    return window_;
  }

 private:
  std::vector<Embedding> subsample(std::span<const Embedding> pool);

  QbcConfig cfg_;
  std::vector<std::vector<Embedding>> members_;
  std::vector<Embedding> labeled_pool_;  // only maintained when rebuilding
  std::deque<double> window_;
  double balance_ = 0.0;
  double last_uncertainty_ = 0.0;
  BudgetTracker tracker_;
  Rng rng_;
};

// ---------------------------------------------------------------------------

/// Never queries. Used for the zero-budget offline baseline.
class NeverQueryStrategy final : public QueryStrategy {
 public:
  bool decide(const Embedding&, double) override { return false; }
  [[nodiscard]] std::string_view name() const noexcept override { return "none"; }
  [[nodiscard]] double spent_budget() const noexcept override { return 0.0; }
};

enum class StrategyKind { Hybrid, Random, Qbc };

[[nodiscard]] std::string_view to_string(StrategyKind kind) noexcept;
/// Throws ConfigError for unknown names.
[[nodiscard]] StrategyKind parse_strategy(std::string_view name);

/// Strategy descriptor plus every hyperparameter any strategy reads.
struct StrategySpec {
  StrategyKind kind = StrategyKind::Hybrid;
  double budget = 0.1;
  double alpha = 0.01;
  std::size_t window = 200;
  std::optional<double> upsilon;
  std::size_t committee_size = 10;
  double inclusion_rate = 0.9;
  std::size_t quantile_window = 200;
  bool rebuild_committee = false;
};

/// Builds the strategy named by `spec`. A zero budget always yields a
/// NeverQueryStrategy. `threshold` seeds the hybrid labeling threshold and
/// `committee_pool` the QBC member sets.
[[nodiscard]] std::unique_ptr<QueryStrategy> make_strategy(
    const StrategySpec& spec, double threshold, std::span<const Embedding> committee_pool,
    std::uint64_t seed);

}  // namespace asdal
