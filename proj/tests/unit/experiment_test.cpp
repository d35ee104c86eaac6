#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "asdal/dataset_io.hpp"
#include "asdal/experiment.hpp"
#include "asdal/metrics.hpp"
#include "asdal/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace asdal;

namespace {

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.budgets = {0.0, 0.1, 0.3};
  cfg.trials = 2;
  cfg.kmeans.k = 8;
  cfg.target_references = 5;
  cfg.threads = 2;
  return cfg;
}

const SynthDataset& data() {
  static const SynthDataset d = generate(fixture::small_synth(21));
  return d;
}

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_results(out, rows);
  return out.str();
}

}  // namespace

TEST(TrialSeed, DistinctAcrossDefaultGrid) {
  const ExperimentConfig cfg;
  for (std::uint64_t base : {0ull, 1ull, 12345ull}) {
    std::set<std::uint64_t> seen;
    std::size_t cells = 0;
    for (int m = 0; m < 7; ++m) {
      const std::string machine = "machine" + std::to_string(m);
      for (auto kind : cfg.strategies) {
        for (double b : cfg.budgets) {
          for (std::size_t t = 0; t < cfg.trials; ++t) {
            seen.insert(trial_seed(base, machine, to_string(kind), b, t));
            ++cells;
          }
        }
      }
    }
    EXPECT_EQ(seen.size(), cells);
  }
}

TEST(Experiment, OneCellOneRow) {
  auto cfg = small_experiment();
  cfg.strategies = {StrategyKind::Random};
  cfg.budgets = {0.1};
  cfg.trials = 1;
  const auto& d = data();
  std::vector<Sample> one_machine;
  for (const auto& s : d.test) {
    if (s.machine == d.test.front().machine) one_machine.push_back(s);
  }
  const auto rows = run_experiment(cfg, d.train, one_machine);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].strategy, "random");
}

TEST(Experiment, RowsCoverGridAndAreConsistent) {
  const auto cfg = small_experiment();
  const auto& d = data();
  const auto rows = run_experiment(cfg, d.train, d.test);
  EXPECT_EQ(rows.size(), 2 * 3 * 3 * 2u);
  auto sorted = rows;
  sort_rows(sorted);
  EXPECT_EQ(sorted, rows);
  const auto model = build_machine_model(d.train, rows.front().machine, cfg);
  for (const auto& r : rows) {
    EXPECT_GE(r.query_fraction, 0.0);
    EXPECT_LE(r.query_fraction, 1.0);
    const auto log = run_trial(model.machine == r.machine
                                   ? model
                                   : build_machine_model(d.train, r.machine, cfg),
                               d.test, parse_strategy(r.strategy), r.budget, r.trial, cfg);
    EXPECT_EQ(r.query_fraction, log.query_fraction());
    EXPECT_EQ(r.seed, log.seed);
    EXPECT_EQ(r.final_normal, log.final_normal);
    EXPECT_EQ(r.final_anomalous, log.final_anomalous);
    if (r.budget == 0.0) EXPECT_EQ(r.query_fraction, 0.0);
  }
}

TEST(Experiment, DeterministicAcrossRunsAndThreadCounts) {
  auto cfg = small_experiment();
  const auto& d = data();
  const auto a = run_experiment(cfg, d.train, d.test);
  cfg.threads = 1;
  const auto b = run_experiment(cfg, d.train, d.test);
  EXPECT_EQ(csv(a), csv(b));
}

TEST(Experiment, ZeroBudgetMatchesOfflineScoring) {
  const auto cfg = small_experiment();
  const auto& d = data();
  const auto rows = run_experiment(cfg, d.train, d.test);
  for (const auto& machine : machines_of(d.test)) {
    const auto model = build_machine_model(d.train, machine, cfg);
    const auto refs = fixture::to_vecs(
        std::vector<Embedding>(model.refs.normal().begin(), model.refs.normal().end()));
    std::vector<double> a, n;
    for (const auto& s : d.test) {
      if (s.machine != machine) continue;
      const double score = oracle::base_score(fixture::to_vec(s.embedding), refs);
      (s.label == Label::Anomalous ? a : n).push_back(score);
    }
    const double expected = oracle::pair_auc(a, n);
    for (const auto& r : rows) {
      if (r.machine == machine && r.budget == 0.0) {
        EXPECT_NEAR(*r.auc_mixed, expected, 1e-12);
      }
    }
  }
}

TEST(Experiment, UnknownMachineInTrainingIsADataError) {
  const auto cfg = small_experiment();
  std::vector<Sample> test{data().test.front()};
  test[0].machine = "ghost";
  EXPECT_THROW((void)run_experiment(cfg, data().train, test), Error);
}

TEST(Experiment, RejectsInvalidConfig) {
  auto cfg = small_experiment();
  cfg.budgets = {1.0};
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = small_experiment();
  cfg.trials = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = small_experiment();
  cfg.strategies.clear();
  EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(Results, CsvRoundTrip) {
  const auto rows = run_experiment(small_experiment(), data().train, data().test);
  const std::string text = csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kResultsHeader);
  std::istringstream in(text);
  EXPECT_EQ(read_results(in), rows);
}

TEST(Results, AbsentMetricsAreEmptyFields) {
  ResultRow r;
  r.machine = "fan";
  r.strategy = "hybrid";
  r.auc_source = 0.5;
  std::ostringstream out;
  write_results(out, std::vector<ResultRow>{r});
  EXPECT_NE(out.str().find(",0.5,,,,,,"), std::string::npos) << out.str();
  std::istringstream in(out.str());
  EXPECT_EQ(read_results(in), std::vector<ResultRow>{r});
}

TEST(Summary, SingleRowHasNoInterval) {
  ResultRow r;
  r.machine = "fan";
  r.strategy = "random";
  r.budget = 0.1;
  r.auc_mixed = 0.8;
  const auto s = summarize(std::vector<ResultRow>{r});
  ASSERT_EQ(s.cells.size(), 1u);
  const auto& m = s.cells[0].metrics.at("auc_mixed");
  EXPECT_EQ(m.mean, 0.8);
  EXPECT_FALSE(m.ci95_half_width);
  EXPECT_THROW((void)summarize(std::vector<ResultRow>{}), ConfigError);
}

TEST(Summary, HarmonicMeanAcrossMachines) {
  const std::vector<double> table{80.40, 74.16, 98.52, 79.74, 88.68, 80.04, 68.47};
  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < table.size(); ++i) {
    ResultRow r;
    r.machine = "m" + std::to_string(i);
    r.strategy = "hybrid";
    r.auc_source = table[i];
    rows.push_back(r);
  }
  const auto s = summarize(rows);
  ASSERT_EQ(s.aggregates.size(), 1u);
  EXPECT_NEAR(*s.aggregates[0].harmonic_means.at("auc_source"), 80.47, 0.01);
  EXPECT_FALSE(s.aggregates[0].harmonic_means.at("auc_target"));
}

TEST(Summary, IdenticalLogsGiveIdenticalSummaries) {
  auto rows = run_experiment(small_experiment(), data().train, data().test);
  std::vector<ResultRow> hybrid, renamed;
  for (const auto& r : rows) {
    if (r.strategy != "hybrid") continue;
    hybrid.push_back(r);
    renamed.push_back(r);
    renamed.back().strategy = "other";
  }
  const auto a = summarize(hybrid);
  const auto b = summarize(renamed);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    for (const auto& [k, v] : a.cells[i].metrics) {
      EXPECT_EQ(v.mean, b.cells[i].metrics.at(k).mean);
      EXPECT_EQ(v.ci95_half_width, b.cells[i].metrics.at(k).ci95_half_width);
    }
  }
}

TEST(Summary, RegeneratedFromCsvIsByteIdentical) {
  const auto rows = run_experiment(small_experiment(), data().train, data().test);
  const std::string direct = summary_to_json(summarize(rows));
  std::istringstream in(csv(rows));
  const auto persisted = read_results(in);
  EXPECT_EQ(summary_to_json(summarize(persisted)), direct);
}

TEST(Config, LoadsJsonAndResolvesPaths) {
  const auto dir = std::filesystem::temp_directory_path() / "asdal_cfg_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "exp.json");
    out << R"({"train": "train.csv", "dataset": "/abs/test.csv", "strategies": ["qbc"],
              "budgets": [0.2], "trials": 3, "seed": 9, "gamma": 0.25, "window": 50})";
  }
  const auto cfg = load_experiment_config(dir / "exp.json");
  EXPECT_EQ(cfg.train_path, dir / "train.csv");
  EXPECT_EQ(cfg.test_path, std::filesystem::path("/abs/test.csv"));
  EXPECT_EQ(cfg.strategies, std::vector<StrategyKind>{StrategyKind::Qbc});
  EXPECT_EQ(cfg.budgets, std::vector<double>{0.2});
  EXPECT_EQ(cfg.trials, 3u);
  EXPECT_EQ(cfg.base_seed, 9u);
  EXPECT_EQ(cfg.scorer.gamma, 0.25);
  EXPECT_EQ(cfg.strategy.window, 50u);

  {
    std::ofstream out(dir / "bad.json");
    out << R"({"trails": 3})";
  }
  EXPECT_THROW((void)load_experiment_config(dir / "bad.json"), ConfigError);
  std::filesystem::remove_all(dir);
}
