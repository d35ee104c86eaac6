#pragma once

#include <optional>
#include <span>
#include <vector>

#include "asdal/engine.hpp"

namespace asdal {

/// Mann-Whitney AUC: fraction of (anomalous, normal) pairs ranked correctly,
/// ties counting one half. O(n log n) via midranks.
/// Throws ConfigError if either collection is empty or holds non-finite values.
[[nodiscard]] double auc(std::span<const double> anomaly_scores,
                         std::span<const double> normal_scores);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// ROC vertices from (0,0) to (1,1), one per distinct score threshold;
/// tied scores move FPR and TPR together.
[[nodiscard]] std::vector<RocPoint> roc_curve(std::span<const double> anomaly_scores,
                                              std::span<const double> normal_scores);

/// Raw area under the ROC curve for FPR in [0, max_fpr] (trapezoidal).
[[nodiscard]] double partial_area(std::span<const double> anomaly_scores,
                                  std::span<const double> normal_scores, double max_fpr);

/// McClish-standardised partial AUC: 0.5 for a random ranking, 1 for a
/// perfect one. Throws ConfigError unless 0 < max_fpr <= 1.
[[nodiscard]] double pauc(std::span<const double> anomaly_scores,
                          std::span<const double> normal_scores, double max_fpr = 0.1);

[[nodiscard]] double standardize_partial_area(double raw_area, double max_fpr);

struct ScoreSplit {
  std::vector<double> anomalies;
  std::vector<double> normals;
};

struct DomainSplits {
  std::optional<ScoreSplit> source;  // source normals vs. all anomalies
  std::optional<ScoreSplit> target;  // target normals vs. all anomalies
  std::optional<ScoreSplit> mixed;   // all normals vs. all anomalies
};

/// A split without normals or without anomalies is left empty.
/// Throws ConfigError for an empty log.
[[nodiscard]] DomainSplits split_by_domain(const TrialLog& log);

struct DomainMetrics {
  std::optional<double> auc_source, auc_target, auc_mixed;
  std::optional<double> pauc_source, pauc_target, pauc_mixed;
};

[[nodiscard]] DomainMetrics evaluate(const TrialLog& log, double max_fpr = 0.1);

}  // namespace asdal
