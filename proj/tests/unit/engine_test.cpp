#include <random>

#include <gtest/gtest.h>

#include "asdal/engine.hpp"
#include "asdal/experiment.hpp"
#include "asdal/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace asdal;

namespace {

struct World {
  SynthDataset data;
  MachineModel model;
  std::vector<Sample> stream;
};

World make_world(std::uint64_t seed = 3) {
  auto data = generate(fixture::small_synth(seed));
  ExperimentConfig cfg;
  cfg.kmeans.k = 8;
  cfg.target_references = 5;
  const std::string machine = data.test.front().machine;
  auto model = build_machine_model(data.train, machine, cfg);
  std::vector<Sample> stream;
  for (const auto& s : data.test) {
    if (s.machine == machine) stream.push_back(s);
  }
  Rng(seed).shuffle(stream);
  return World{std::move(data), std::move(model), std::move(stream)};
}

EngineConfig engine_config(StrategyKind kind, double budget) {
  EngineConfig cfg;
  cfg.strategy.kind = kind;
  cfg.strategy.budget = budget;
  return cfg;
}

class FailingOracle final : public Oracle {
 public:
  Label query(const std::string&) override { throw DataError("label service unavailable"); }
};

}  // namespace

TEST(InitialThreshold, Examples) {
  std::vector<double> m;
  for (int i = 0; i < 10; ++i) m.push_back(0.01 * i);
  EXPECT_NEAR(initial_threshold(m, 0.9), 0.081, 1e-15);
  EXPECT_EQ(initial_threshold(std::vector<double>{0.37}, 0.9), 0.37);
  EXPECT_EQ(initial_threshold(std::vector<double>{0.0, 0.0, 0.0}, 0.9), 1e-6);
  EXPECT_EQ(initial_threshold(std::vector<double>{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2}, 0.9),
            0.2);
}

TEST(Engine, SelfMatchingPoolGivesDegenerateThreshold) {
  std::mt19937_64 gen(51);
  const auto normals = fixture::random_embeddings(gen, 6, 3);
  StreamEngine engine(ReferenceSets(normals), normals, engine_config(StrategyKind::Hybrid, 0.1), 1);
  for (double s : engine.score_pool()) EXPECT_NEAR(s, 0.0, 1e-15);
  EXPECT_GT(engine.initial_labeling_threshold(), 0.0);
}

TEST(Engine, RejectsEmptyInputs) {
  const auto w = make_world();
  EXPECT_THROW(StreamEngine(w.model.refs, std::span<const Embedding>{},
                            engine_config(StrategyKind::Hybrid, 0.1), 1),
               ConfigError);
  StreamEngine engine(w.model.refs, w.model.labeled_normals,
                      engine_config(StrategyKind::Hybrid, 0.1), 1);
  DatasetOracle oracle(w.stream);
  EXPECT_THROW((void)engine.run_stream(std::span<const Sample>{}, oracle), ConfigError);
}

TEST(Engine, ZeroBudgetLeavesSetsUntouched) {
  const auto w = make_world();
  StreamEngine engine(w.model.refs, w.model.labeled_normals,
                      engine_config(StrategyKind::Hybrid, 0.0), 1);
  DatasetOracle oracle(w.stream);
  const auto log = engine.run_stream(w.stream, oracle);
  EXPECT_EQ(log.query_count(), 0u);
  EXPECT_EQ(oracle.queries(), 0u);
  EXPECT_EQ(log.final_normal, w.model.refs.normal().size());
  EXPECT_EQ(log.final_anomalous, 0u);
  for (std::size_t i = 0; i < w.stream.size(); ++i) {
    EXPECT_FALSE(log.records[i].queried);
    EXPECT_EQ(log.records[i].score, base_score(w.stream[i].embedding, w.model.refs));
  }
}

TEST(Engine, QueriedLabelsGrowTheMatchingSet) {
  const auto w = make_world();
  StreamEngine engine(w.model.refs, w.model.labeled_normals,
                      engine_config(StrategyKind::Random, 0.5), 4);
  DatasetOracle oracle(w.stream);
  for (const auto& x : w.stream) {
    const std::size_t n0 = engine.references().normal().size();
    const std::size_t a0 = engine.references().anomalous().size();
    const std::size_t m0 = engine.score_pool().size();
    const double pool_score = base_score(x.embedding, engine.references());
    const auto rec = engine.process_sample(x, oracle);
    if (!rec.queried) {
      EXPECT_EQ(engine.references().normal().size(), n0);
      EXPECT_EQ(engine.references().anomalous().size(), a0);
      continue;
    }
    ASSERT_TRUE(rec.oracle_label);
    EXPECT_EQ(*rec.oracle_label, x.label);
    if (x.label == Label::Anomalous) {
      EXPECT_EQ(engine.references().anomalous().size(), a0 + 1);
      EXPECT_EQ(engine.score_pool().size(), m0);
    } else {
      EXPECT_EQ(engine.references().normal().size(), n0 + 1);
      EXPECT_EQ(engine.score_pool().size(), m0 + 1);
      EXPECT_EQ(engine.score_pool().back(), pool_score);
    }
  }
}

TEST(Engine, RecordedScoreIsPreUpdate) {
  const auto w = make_world(5);
  for (auto kind : {StrategyKind::Hybrid, StrategyKind::Random, StrategyKind::Qbc}) {
    const auto cfg = engine_config(kind, 0.3);
    StreamEngine full(w.model.refs, w.model.labeled_normals, cfg, 8);
    DatasetOracle oracle(w.stream);
    const auto log = full.run_stream(w.stream, oracle);

    // Paired replays that stop applying updates exactly at sample k.
    for (std::size_t k = 0; k < w.stream.size(); k += 7) {
      StreamEngine paired(w.model.refs, w.model.labeled_normals, cfg, 8);
      DatasetOracle paired_oracle(w.stream);
      for (std::size_t i = 0; i < k; ++i) (void)paired.process_sample(w.stream[i], paired_oracle);
      paired.set_updates_enabled(false);
      const auto rec = paired.process_sample(w.stream[k], paired_oracle);
      EXPECT_EQ(rec.score, log.records[k].score);
      EXPECT_EQ(rec.queried, log.records[k].queried);
    }
  }
}

TEST(Engine, ScoresMatchOracleOnReplayedSets) {
  const auto w = make_world(6);
  StreamEngine engine(w.model.refs, w.model.labeled_normals,
                      engine_config(StrategyKind::Hybrid, 0.3), 2);
  DatasetOracle oracle(w.stream);
  auto normals = fixture::to_vecs(std::vector<Embedding>(w.model.refs.normal().begin(),
                                                         w.model.refs.normal().end()));
  std::vector<oracle::Vec> anomalies;
  for (const auto& x : w.stream) {
    const auto xv = fixture::to_vec(x.embedding);
    const double expected = oracle::augmented_score(xv, normals, anomalies, 0.5);
    const auto rec = engine.process_sample(x, oracle);
    EXPECT_NEAR(rec.score, expected, 1e-12);
    if (rec.queried) (x.label == Label::Normal ? normals : anomalies).push_back(xv);
  }
}

TEST(Engine, SetGrowthEqualsQueryCount) {
  const auto w = make_world(7);
  for (auto kind : {StrategyKind::Hybrid, StrategyKind::Random, StrategyKind::Qbc}) {
    for (double b : {0.05, 0.1, 0.3}) {
      StreamEngine engine(w.model.refs, w.model.labeled_normals, engine_config(kind, b), 11);
      DatasetOracle oracle(w.stream);
      const auto log = engine.run_stream(w.stream, oracle);
      EXPECT_EQ(log.final_normal + log.final_anomalous - w.model.refs.normal().size(),
                log.query_count());
      EXPECT_EQ(oracle.queries(), log.query_count());
    }
  }
}

TEST(Engine, ReplayIsDeterministic) {
  const auto w = make_world(8);
  for (auto kind : {StrategyKind::Hybrid, StrategyKind::Random, StrategyKind::Qbc}) {
    const auto cfg = engine_config(kind, 0.2);
    StreamEngine a(w.model.refs, w.model.labeled_normals, cfg, 12);
    StreamEngine b(w.model.refs, w.model.labeled_normals, cfg, 12);
    DatasetOracle oa(w.stream), ob(w.stream);
    EXPECT_EQ(a.run_stream(w.stream, oa), b.run_stream(w.stream, ob));
  }
}

TEST(Engine, HybridShortStreamStaysNearBudget) {
  auto cfg = fixture::small_synth(9);
  cfg.test_normal_source = 50;
  cfg.test_normal_target = 50;
  cfg.test_anomalous = 100;
  const auto data = generate(cfg);
  ExperimentConfig ecfg;
  ecfg.kmeans.k = 8;
  const std::string machine = data.test.front().machine;
  const auto model = build_machine_model(data.train, machine, ecfg);
  std::vector<Sample> stream;
  for (const auto& s : data.test) {
    if (s.machine == machine) stream.push_back(s);
  }
  ASSERT_EQ(stream.size(), 200u);
  // The moving average starts at zero; with w = 200 its warm-up burst alone
  // is about b * w queries, so the short-stream bound needs a short window.
  EngineConfig engine_cfg = engine_config(StrategyKind::Hybrid, 0.1);
  engine_cfg.strategy.window = 20;
  StreamEngine engine(model.refs, model.labeled_normals, engine_cfg, 13);
  DatasetOracle oracle(stream);
  EXPECT_LE(engine.run_stream(stream, oracle).query_fraction(), 0.15);
}

TEST(Engine, OracleFailureAbortsWithoutPartialUpdate) {
  const auto w = make_world(10);
  StreamEngine engine(w.model.refs, w.model.labeled_normals,
                      engine_config(StrategyKind::Random, 1.0), 14);
  FailingOracle oracle;
  const std::size_t n0 = engine.references().normal().size();
  EXPECT_THROW((void)engine.process_sample(w.stream.front(), oracle), DataError);
  EXPECT_EQ(engine.references().normal().size(), n0);
  EXPECT_TRUE(engine.references().anomalous().empty());
  EXPECT_THROW((void)engine.run_stream(w.stream, oracle), TrialError);
}

TEST(DatasetOracle, UnknownIdIsATrialError) {
  const auto w = make_world();
  DatasetOracle oracle(w.stream);
  EXPECT_THROW((void)oracle.query("nope"), TrialError);
  EXPECT_EQ(oracle.query(w.stream.front().id), w.stream.front().label);
}
