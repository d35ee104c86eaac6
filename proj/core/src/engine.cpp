#include "asdal/engine.hpp"

#include <algorithm>
#include <string>

#include "asdal/statistics.hpp"

namespace asdal {

DatasetOracle::DatasetOracle(std::span<const Sample> samples) {
  for (const auto& s : samples) labels_.emplace(s.id, s.label);
}

Label DatasetOracle::query(const std::string& sample_id) {
  const auto it = labels_.find(sample_id);
  if (it == labels_.end()) throw TrialError("oracle has no label for sample '" + sample_id + "'");
  ++queries_;
  return it->second;
}

void validate(const EngineConfig& cfg) {
  validate(cfg.scorer);
  if (!(cfg.initial_quantile > 0.0 && cfg.initial_quantile < 1.0)) {
    throw ConfigError("initial_quantile must lie in (0, 1)");
  }
}

std::size_t TrialLog::query_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.queried; }));
}

double TrialLog::query_fraction() const noexcept {
  if (records.empty()) return 0.0;
  return static_cast<double>(query_count()) / static_cast<double>(records.size());
}

double initial_threshold(std::span<const double> pool_scores, double q) {
  const double h = quantile(pool_scores, q);
  if (h > 0.0) return h;
  double smallest = 0.0;
  for (double s : pool_scores) {
    if (s > 0.0 && (smallest == 0.0 || s < smallest)) smallest = s;
  }
  return smallest > 0.0 ? smallest : 1e-6;
}

StreamEngine::StreamEngine(ReferenceSets refs, std::span<const Embedding> labeled_normals,
                           const EngineConfig& cfg, std::uint64_t seed)
    : refs_(std::move(refs)), cfg_(cfg), seed_(seed) {
  validate(cfg_);
  if (labeled_normals.empty()) throw ConfigError("engine needs a non-empty labeled normal pool");
  pool_.reserve(labeled_normals.size());
  for (const auto& e : labeled_normals) pool_.push_back(base_score(e, refs_));
  threshold_ = initial_threshold(pool_, cfg_.initial_quantile);
  strategy_ = make_strategy(cfg_.strategy, threshold_, refs_.normal(), seed_);
}

DecisionRecord StreamEngine::process_sample(const Sample& x, Oracle& oracle) {
  DecisionRecord rec;
  rec.sample_id = x.id;
  rec.arrival_index = arrivals_++;
  rec.truth_label = x.label;
  rec.domain = x.domain;
  rec.machine = x.machine;

  rec.score = augmented_score(x.embedding, refs_, cfg_.scorer);
  rec.queried = strategy_->decide(x.embedding, rec.score);
  if (!rec.queried) return rec;

  // The oracle answers before anything is mutated, so a failure leaves the
  // engine untouched.
  const Label y = oracle.query(x.id);
  rec.oracle_label = y;
  if (!updates_enabled_) return rec;

  const double pool_score = y == Label::Normal ? base_score(x.embedding, refs_) : 0.0;
  refs_.add_member(x.embedding, y);
  if (y == Label::Normal) pool_.push_back(pool_score);
  strategy_->observe_label(x.embedding, y);
  return rec;
}

TrialLog StreamEngine::run_stream(std::span<const Sample> samples, Oracle& oracle) {
  if (samples.empty()) throw ConfigError("run_stream: empty stream");
  TrialLog log;
  log.seed = seed_;
  log.records.reserve(samples.size());
  for (const auto& x : samples) {
    try {
      log.records.push_back(process_sample(x, oracle));
    } catch (const TrialError&) {
      throw;
    } catch (const std::exception& ex) {
      throw TrialError("sample '" + x.id + "': " + ex.what());
    }
  }
  log.final_normal = refs_.normal().size();
  log.final_anomalous = refs_.anomalous().size();
  return log;
}

}  // namespace asdal
