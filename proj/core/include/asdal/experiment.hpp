#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asdal/engine.hpp"
#include "asdal/reference.hpp"
#include "asdal/strategies.hpp"
#include "asdal/types.hpp"

namespace asdal {

struct ExperimentConfig {
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  std::filesystem::path output_dir;

  std::vector<StrategyKind> strategies{StrategyKind::Hybrid, StrategyKind::Random,
                                       StrategyKind::Qbc};
  std::vector<double> budgets{0.0, 0.1, 0.2, 0.3};
  std::size_t trials = 10;
  std::uint64_t base_seed = 0;

  ScorerConfig scorer;
  StrategySpec strategy;  // hyperparameters; kind and budget are overridden per cell
  KMeansConfig kmeans;    // seed is derived per machine
  std::size_t target_references = 10;
  double initial_quantile = 0.9;
  double max_fpr = 0.1;
  std::optional<double> decision_threshold;

  std::size_t threads = 0;  // 0: hardware concurrency
};

/// Throws ConfigError on budgets outside [0, 1), zero trials, empty
/// strategy/budget lists or invalid hyperparameters.
void validate(const ExperimentConfig& cfg);

/// Reads a JSON experiment config. Unknown keys are rejected.
[[nodiscard]] ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ResultRow {
  std::string machine;
  std::string strategy;
  double budget = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> auc_source, auc_target, auc_mixed;
  std::optional<double> pauc_source, pauc_target, pauc_mixed;
  double query_fraction = 0.0;
  std::size_t final_normal = 0;
  std::size_t final_anomalous = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Stable per-cell seed from the experiment coordinates.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t base_seed, std::string_view machine,
                                       std::string_view strategy, double budget,
                                       std::size_t trial);

/// Initial model for one machine: reference sets plus the labeled normal
/// pool used for threshold initialisation.
struct MachineModel {
  std::string machine;
  ReferenceSets refs;
  std::vector<Embedding> labeled_normals;
};

/// k-means over the machine's source training normals plus its first
/// `target_references` target training normals, in dataset order.
[[nodiscard]] MachineModel build_machine_model(std::span<const Sample> train,
                                               const std::string& machine,
                                               const ExperimentConfig& cfg);

/// Runs one (machine, strategy, budget, trial) cell on a fresh engine.
[[nodiscard]] TrialLog run_trial(const MachineModel& model, std::span<const Sample> test,
                                 StrategyKind kind, double budget, std::size_t trial,
                                 const ExperimentConfig& cfg);

/// Full grid over every machine present in `test`. Rows are sorted by
/// (machine, strategy, budget, trial). Throws TrialError naming the failing
/// cell.
[[nodiscard]] std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg,
                                                    std::span<const Sample> train,
                                                    std::span<const Sample> test);
[[nodiscard]] std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

void sort_rows(std::vector<ResultRow>& rows);

// Results CSV. The header is fixed; absent metrics are empty fields.
inline constexpr std::string_view kResultsHeader =
    "machine,strategy,budget,trial,seed,auc_source,auc_target,auc_mixed,"
    "pauc_source,pauc_target,pauc_mixed,query_fraction,n_normal,n_anomalous";

void write_results(std::ostream& out, std::span<const ResultRow> rows);
[[nodiscard]] std::vector<ResultRow> read_results(std::istream& in,
                                                  std::string_view source_name = "<stream>");
[[nodiscard]] std::vector<ResultRow> load_results(const std::filesystem::path& path);

struct MetricSummary {
  double mean = 0.0;
  std::optional<double> ci95_half_width;
  std::size_t n = 0;
};

struct CellSummary {
  std::string strategy;
  double budget = 0.0;
  std::string machine;
  std::map<std::string, MetricSummary> metrics;
};

struct AggregateSummary {
  std::string strategy;
  double budget = 0.0;
  // Harmonic mean across machines of the per-machine trial means. Absent
  // when no machine has the metric or some machine mean is zero.
  std::map<std::string, std::optional<double>> harmonic_means;
  std::size_t machines = 0;
};

struct Summary {
  std::vector<CellSummary> cells;
  std::vector<AggregateSummary> aggregates;
};

/// Means, 95% CIs and cross-machine harmonic means. Throws ConfigError on
/// empty input.
[[nodiscard]] Summary summarize(std::span<const ResultRow> rows);
[[nodiscard]] std::string summary_to_json(const Summary& summary);

}  // namespace asdal
