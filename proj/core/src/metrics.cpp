#include "asdal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace asdal {
namespace {

void check_scores(std::span<const double> anomaly_scores, std::span<const double> normal_scores) {
  if (anomaly_scores.empty() || normal_scores.empty()) {
    throw ConfigError("ROC metrics need at least one anomalous and one normal score");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(anomaly_scores.begin(), anomaly_scores.end(), finite) ||
      !std::all_of(normal_scores.begin(), normal_scores.end(), finite)) {
    throw ConfigError("ROC metrics need finite scores");
  }
}

}  // namespace

double auc(std::span<const double> anomaly_scores, std::span<const double> normal_scores) {
  check_scores(anomaly_scores, normal_scores);
  // (score, is_anomaly) sorted ascending; midranks for tie groups.
  std::vector<std::pair<double, bool>> all;
  all.reserve(anomaly_scores.size() + normal_scores.size());
  for (double s : anomaly_scores) all.emplace_back(s, true);
  for (double s : normal_scores) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum = 0.0;  // sum of 1-based midranks of anomalies
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    std::size_t anomalies = 0;
    while (j < all.size() && all[j].first == all[i].first) {
      if (all[j].second) ++anomalies;
      ++j;
    }
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    rank_sum += midrank * static_cast<double>(anomalies);
    i = j;
  }
  const auto na = static_cast<double>(anomaly_scores.size());
  const auto nn = static_cast<double>(normal_scores.size());
  const double u = rank_sum - na * (na + 1.0) / 2.0;
  return u / (na * nn);
}

std::vector<RocPoint> roc_curve(std::span<const double> anomaly_scores,
                                std::span<const double> normal_scores) {
  check_scores(anomaly_scores, normal_scores);
  std::vector<std::pair<double, bool>> all;
  all.reserve(anomaly_scores.size() + normal_scores.size());
  for (double s : anomaly_scores) all.emplace_back(s, true);
  for (double s : normal_scores) all.emplace_back(s, false);
  // Descending: lowering the threshold admits the highest scores first.
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const auto na = static_cast<double>(anomaly_scores.size());
  const auto nn = static_cast<double>(normal_scores.size());
  std::vector<RocPoint> roc{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < all.size()) {
    const double s = all[i].first;
    while (i < all.size() && all[i].first == s) {
      (all[i].second ? tp : fp) += 1;
      ++i;
    }
    roc.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / na});
  }
  return roc;
}

double partial_area(std::span<const double> anomaly_scores, std::span<const double> normal_scores,
                    double max_fpr) {
  if (!(max_fpr > 0.0 && max_fpr <= 1.0)) throw ConfigError("max_fpr must lie in (0, 1]");
  const auto roc = roc_curve(anomaly_scores, normal_scores);
  double area = 0.0;
  for (std::size_t k = 1; k < roc.size(); ++k) {
    const RocPoint a = roc[k - 1];
    RocPoint b = roc[k];
    if (a.fpr >= max_fpr) break;
    if (b.fpr > max_fpr) {
      // Cut the segment at the strip boundary.
      const double t = (max_fpr - a.fpr) / (b.fpr - a.fpr);
      b = {max_fpr, a.tpr + t * (b.tpr - a.tpr)};
    }
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

double standardize_partial_area(double raw_area, double max_fpr) {
  const double min_area = max_fpr * max_fpr / 2.0;
  const double max_area = max_fpr;
  return 0.5 * (1.0 + (raw_area - min_area) / (max_area - min_area));
}

double pauc(std::span<const double> anomaly_scores, std::span<const double> normal_scores,
            double max_fpr) {
  return standardize_partial_area(partial_area(anomaly_scores, normal_scores, max_fpr), max_fpr);
}

DomainSplits split_by_domain(const TrialLog& log) {
  if (log.records.empty()) throw ConfigError("split_by_domain: empty trial log");
  ScoreSplit source, target, mixed;
  for (const auto& r : log.records) {
    if (r.truth_label == Label::Anomalous) {
      source.anomalies.push_back(r.score);
      target.anomalies.push_back(r.score);
      mixed.anomalies.push_back(r.score);
    } else {
      (r.domain == Domain::Source ? source : target).normals.push_back(r.score);
      mixed.normals.push_back(r.score);
    }
  }
  auto keep = [](ScoreSplit s) -> std::optional<ScoreSplit> {
    if (s.anomalies.empty() || s.normals.empty()) return std::nullopt;
    return s;
  };
  return {keep(std::move(source)), keep(std::move(target)), keep(std::move(mixed))};
}

DomainMetrics evaluate(const TrialLog& log, double max_fpr) {
  const DomainSplits splits = split_by_domain(log);
  DomainMetrics m;
  auto fill = [max_fpr](const std::optional<ScoreSplit>& s, std::optional<double>& a,
                        std::optional<double>& p) {
    if (!s) return;
    a = auc(s->anomalies, s->normals);
    p = pauc(s->anomalies, s->normals, max_fpr);
  };
  fill(splits.source, m.auc_source, m.pauc_source);
  fill(splits.target, m.auc_target, m.pauc_target);
  fill(splits.mixed, m.auc_mixed, m.pauc_mixed);
  return m;
}

}  // namespace asdal
