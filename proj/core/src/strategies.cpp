#include "asdal/strategies.hpp"

#include <cmath>
#include <string>

#include "asdal/statistics.hpp"

namespace asdal {

BudgetTracker::BudgetTracker(double budget, std::size_t window)
    : budget_(budget), window_(window) {
  if (!(budget >= 0.0 && budget <= 1.0)) throw ConfigError("budget must lie in [0, 1]");
  if (window == 0) throw ConfigError("budget window must be positive");
}

void BudgetTracker::update(bool queried) noexcept {
  const double w = static_cast<double>(window_);
  spent_ = ((w - 1.0) * spent_ + (queried ? 1.0 : 0.0)) / w;
}

// ---------------------------------------------------------------------------

void validate(const HybridConfig& cfg) {
  if (!(cfg.budget >= 0.0 && cfg.budget <= 1.0)) throw ConfigError("budget must lie in [0, 1]");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (cfg.window == 0) throw ConfigError("window must be positive");
  if (cfg.upsilon && !(*cfg.upsilon >= 0.0 && *cfg.upsilon < 1.0)) {
    throw ConfigError("upsilon must lie in [0, 1)");
  }
}

HybridStrategy::HybridStrategy(const HybridConfig& cfg, double threshold, std::uint64_t seed)
    : cfg_(cfg), threshold_(threshold), tracker_(cfg.budget, cfg.window), rng_(seed) {
  validate(cfg_);
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw ConfigError("labeling threshold must be positive and finite");
  }
}

bool HybridStrategy::decide(double score) {
  bool query = false;
  const double spent = tracker_.spent();
  const double budget = tracker_.budget();
  if (spent < budget) {
    if (cfg_.upsilon) {
      const double eta = rng_.uniform01();
      query = eta > *cfg_.upsilon ? score > threshold_ : rng_.bernoulli(budget);
    } else if (score > threshold_) {
      query = true;
    } else {
      const double eta = rng_.uniform01();
      query = eta > spent / budget;
    }
    threshold_ *= 1.0 + cfg_.alpha;
  } else {
    threshold_ *= 1.0 - cfg_.alpha;
  }
  tracker_.update(query);
  return query;
}

// ---------------------------------------------------------------------------

RandomStrategy::RandomStrategy(double budget, std::size_t window, std::uint64_t seed)
    : tracker_(budget, window), rng_(seed) {}

bool RandomStrategy::decide() {
  const bool query = rng_.uniform01() < tracker_.budget();
  tracker_.update(query);
  return query;
}

// ---------------------------------------------------------------------------

double qbc_uncertainty(std::span<const double> member_scores) {
  if (member_scores.size() < 2) throw ConfigError("committee needs at least two members");
  const double mean = arithmetic_mean(member_scores);
  double dev = 0.0;
  for (double s : member_scores) dev += std::abs(s - mean);
  return dev / static_cast<double>(member_scores.size());
}

void validate(const QbcConfig& cfg) {
  if (!(cfg.budget >= 0.0 && cfg.budget <= 1.0)) throw ConfigError("budget must lie in [0, 1]");
  if (cfg.committee_size < 2) throw ConfigError("committee_size must be at least 2");
  if (!(cfg.inclusion_rate >= 0.0 && cfg.inclusion_rate <= 1.0)) {
    throw ConfigError("inclusion_rate must lie in [0, 1]");
  }
  if (cfg.quantile_window == 0) throw ConfigError("quantile window must be positive");
  if (cfg.window == 0) throw ConfigError("window must be positive");
}

QbcStrategy::QbcStrategy(const QbcConfig& cfg, std::span<const Embedding> labeled_normals,
                         std::uint64_t seed)
    : cfg_(cfg), tracker_(cfg.budget, cfg.window), rng_(seed) {
  validate(cfg_);
  if (labeled_normals.empty()) throw ConfigError("QBC committee needs labeled normals");
  require_uniform_dimension(labeled_normals);
  if (cfg_.rebuild_committee) labeled_pool_.assign(labeled_normals.begin(), labeled_normals.end());
  members_.reserve(cfg_.committee_size);
  for (std::size_t m = 0; m < cfg_.committee_size; ++m) {
    members_.push_back(subsample(labeled_normals));
  }
}

std::vector<Embedding> QbcStrategy::subsample(std::span<const Embedding> pool) {
  std::vector<Embedding> out;
  for (const auto& e : pool) {
    if (rng_.bernoulli(cfg_.inclusion_rate)) out.push_back(e);
  }
  if (out.empty()) out.push_back(pool[rng_.uniform_index(pool.size())]);
  return out;
}

bool QbcStrategy::decide(const Embedding& e, double /*score*/) {
  std::vector<double> scores;
  scores.reserve(members_.size());
  for (const auto& set : members_) scores.push_back(base_score(e, set));
  last_uncertainty_ = qbc_uncertainty(scores);

  window_.push_back(last_uncertainty_);
  while (window_.size() > cfg_.quantile_window) window_.pop_front();

  balance_ += tracker_.budget();
  bool query = false;
  if (balance_ >= 1.0) {
    const std::vector<double> recent(window_.begin(), window_.end());
    const double gate = quantile(recent, 1.0 - tracker_.budget());
    if (last_uncertainty_ >= gate) {
      query = true;
      balance_ -= 1.0;
    }
  }
  tracker_.update(query);
  return query;
}

void QbcStrategy::observe_label(const Embedding& e, Label y) {
  if (y == Label::Normal) update_committee(e);
}

void QbcStrategy::update_committee(const Embedding& e) {
  if (cfg_.rebuild_committee) {
    labeled_pool_.push_back(e);
    for (auto& set : members_) set = subsample(labeled_pool_);
    return;
  }
  for (auto& set : members_) {
    if (rng_.bernoulli(cfg_.inclusion_rate)) set.push_back(e);
  }
}

// ---------------------------------------------------------------------------

std::string_view to_string(StrategyKind kind) noexcept {
  switch (kind) {
    case StrategyKind::Hybrid: return "hybrid";
    case StrategyKind::Random: return "random";
    case StrategyKind::Qbc: return "qbc";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  if (name == "hybrid") return StrategyKind::Hybrid;
  if (name == "random") return StrategyKind::Random;
  if (name == "qbc") return StrategyKind::Qbc;
  throw ConfigError("unknown strategy '" + std::string(name) + "' (expected hybrid, random or qbc)");
}

std::unique_ptr<QueryStrategy> make_strategy(const StrategySpec& spec, double threshold,
                                             std::span<const Embedding> committee_pool,
                                             std::uint64_t seed) {
  if (spec.budget == 0.0) return std::make_unique<NeverQueryStrategy>();
  switch (spec.kind) {
    case StrategyKind::Hybrid: {
      HybridConfig cfg{spec.budget, spec.alpha, spec.window, spec.upsilon};
      return std::make_unique<HybridStrategy>(cfg, threshold, seed);
    }
    case StrategyKind::Random:
      return std::make_unique<RandomStrategy>(spec.budget, spec.window, seed);
    case StrategyKind::Qbc: {
      QbcConfig cfg{spec.budget,          spec.committee_size, spec.inclusion_rate,
                    spec.quantile_window, spec.window,         spec.rebuild_committee};
      return std::make_unique<QbcStrategy>(cfg, committee_pool, seed);
    }
  }
  throw ConfigError("unknown strategy kind");
}

}  // namespace asdal
