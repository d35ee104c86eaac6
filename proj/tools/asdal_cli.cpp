// asdal: stream-based active learning for embedding anomaly detection.
//
//   asdal synth  --out DIR [generator options]
//   asdal run    --train TRAIN.csv --dataset TEST.csv --out DIR [options]
//   asdal report --results results.csv [--out DIR]
//   asdal score  --train TRAIN.csv --dataset TEST.csv [--out scores.csv]
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 trial failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asdal/dataset_io.hpp"
#include "asdal/experiment.hpp"
#include "asdal/metrics.hpp"
#include "asdal/synth.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kTrial = 3 };

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw asdal::ConfigError("cannot create output directory '" + dir.string() + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw asdal::ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

std::string pct(const std::optional<double>& v) {
  if (!v) return "    -";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%6.2f", 100.0 * *v);
  return buf;
}

void print_aggregates(const asdal::Summary& summary, std::ostream& os) {
  os << "strategy  budget  machines  AUC(src)  AUC(tgt)  AUC(mix)  pAUC(src) pAUC(tgt) pAUC(mix)\n";
  for (const auto& a : summary.aggregates) {
    char head[64];
    std::snprintf(head, sizeof head, "%-8s  %6.3f  %8zu", a.strategy.c_str(), a.budget, a.machines);
    os << head;
    for (const char* m : {"auc_source", "auc_target", "auc_mixed", "pauc_source", "pauc_target",
                          "pauc_mixed"}) {
      const auto it = a.harmonic_means.find(m);
      os << "    " << pct(it == a.harmonic_means.end() ? std::nullopt : it->second);
    }
    os << '\n';
  }
}

struct RunOptions {
  std::string config;
  std::string train;
  std::string dataset;
  std::string out;
  std::string strategy;
  std::optional<double> budget;
  std::string budgets;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma;
  std::optional<double> alpha;
  std::optional<std::size_t> window;
  std::optional<double> upsilon;
  std::optional<std::size_t> committee_size;
  std::optional<double> inclusion_rate;
  std::optional<std::size_t> kmeans_k;
  std::optional<std::size_t> threads;
  bool rebuild_committee = false;
};

asdal::ExperimentConfig make_experiment_config(const RunOptions& o) {
  asdal::ExperimentConfig cfg;
  if (!o.config.empty()) cfg = asdal::load_experiment_config(o.config);
  if (!o.train.empty()) cfg.train_path = o.train;
  if (!o.dataset.empty()) cfg.test_path = o.dataset;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.strategy.empty()) {
    cfg.strategies.clear();
    for (const auto& name : split_list(o.strategy)) {
      cfg.strategies.push_back(asdal::parse_strategy(name));
    }
  }
  if (!o.budgets.empty()) {
    cfg.budgets.clear();
    for (const auto& b : split_list(o.budgets)) {
      try {
        cfg.budgets.push_back(asdal::parse_real(b));
      } catch (const asdal::DataError& ex) {
        throw asdal::ConfigError(std::string("--budgets: ") + ex.what());
      }
    }
  }
  if (o.budget) cfg.budgets = {*o.budget};
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.gamma) cfg.scorer.gamma = *o.gamma;
  if (o.alpha) cfg.strategy.alpha = *o.alpha;
  if (o.window) cfg.strategy.window = *o.window;
  if (o.upsilon) cfg.strategy.upsilon = *o.upsilon;
  if (o.committee_size) cfg.strategy.committee_size = *o.committee_size;
  if (o.inclusion_rate) cfg.strategy.inclusion_rate = *o.inclusion_rate;
  if (o.kmeans_k) cfg.kmeans.k = *o.kmeans_k;
  if (o.threads) cfg.threads = *o.threads;
  if (o.rebuild_committee) cfg.strategy.rebuild_committee = true;
  return cfg;
}

int cmd_synth(const asdal::SynthConfig& cfg, const std::string& out) {
  const fs::path dir(out);
  ensure_dir(dir);
  const auto data = asdal::generate(cfg);
  asdal::save_dataset(dir / "train.csv", data.train);
  asdal::save_dataset(dir / "test.csv", data.test);
  std::cout << "wrote " << data.train.size() << " training and " << data.test.size()
            << " test samples to " << dir.string() << '\n';
  return kOk;
}

int cmd_run(const RunOptions& opts) {
  const asdal::ExperimentConfig cfg = make_experiment_config(opts);
  if (cfg.output_dir.empty()) throw asdal::ConfigError("run: --out is required");
  const auto rows = asdal::run_experiment(cfg);
  ensure_dir(cfg.output_dir);
  {
    std::ostringstream csv;
    asdal::write_results(csv, rows);
    write_text(cfg.output_dir / "results.csv", csv.str());
  }
  const auto summary = asdal::summarize(rows);
  write_text(cfg.output_dir / "summary.json", asdal::summary_to_json(summary));
  print_aggregates(summary, std::cout);
  std::cout << rows.size() << " trials; results in " << cfg.output_dir.string() << '\n';
  return kOk;
}

int cmd_report(const std::string& results, const std::string& out) {
  const auto rows = asdal::load_results(results);
  const auto summary = asdal::summarize(rows);
  const std::string json = asdal::summary_to_json(summary);
  if (out.empty()) {
    std::cout << json;
  } else {
    ensure_dir(out);
    write_text(fs::path(out) / "summary.json", json);
    print_aggregates(summary, std::cout);
  }
  return kOk;
}

int cmd_score(const RunOptions& opts) {
  asdal::ExperimentConfig cfg = make_experiment_config(opts);
  if (cfg.train_path.empty() || cfg.test_path.empty()) {
    throw asdal::ConfigError("score: --train and --dataset are required");
  }
  const auto train = asdal::load_dataset(cfg.train_path);
  const auto test = asdal::load_dataset(cfg.test_path);

  std::ostringstream csv;
  csv << "id,machine,domain,label,score\n";
  std::cerr << "machine     AUC(src)  AUC(tgt)  AUC(mix)  pAUC(mix)\n";
  auto machines = asdal::machines_of(test);
  std::sort(machines.begin(), machines.end());
  for (const auto& machine : machines) {
    const auto model = asdal::build_machine_model(train, machine, cfg);
    asdal::TrialLog log;
    for (const auto& s : test) {
      if (s.machine != machine) continue;
      const double score = asdal::base_score(s.embedding, model.refs);
      csv << s.id << ',' << s.machine << ',' << asdal::to_string(s.domain) << ','
          << static_cast<int>(s.label) << ',' << asdal::format_real(score) << '\n';
      asdal::DecisionRecord r;
      r.sample_id = s.id;
      r.score = score;
      r.truth_label = s.label;
      r.domain = s.domain;
      r.machine = s.machine;
      log.records.push_back(std::move(r));
    }
    const auto m = asdal::evaluate(log, cfg.max_fpr);
    char name[16];
    std::snprintf(name, sizeof name, "%-10s", machine.c_str());
    std::cerr << name << "  " << pct(m.auc_source) << "    " << pct(m.auc_target) << "    "
              << pct(m.auc_mixed) << "    " << pct(m.pauc_mixed) << '\n';
  }
  if (opts.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(opts.out, csv.str());
  }
  return kOk;
}

void add_hyperparameters(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--train", o.train, "training dataset CSV");
  cmd->add_option("--dataset", o.dataset, "test dataset CSV");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--gamma", o.gamma, "anomalous-set blend weight");
  cmd->add_option("--kmeans-k", o.kmeans_k, "k-means clusters per machine");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stream-based active learning for embedding anomaly detection"};
  app.require_subcommand(1);

  asdal::SynthConfig synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic embedding benchmark");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "generator seed");
  synth_cmd->add_option("--dim", synth.dim, "embedding dimension");
  synth_cmd->add_option("--machines", synth.machines, "number of machines");
  synth_cmd->add_option("--source-train", synth.source_train, "source training normals per machine");
  synth_cmd->add_option("--target-train", synth.target_train, "target training normals per machine");
  synth_cmd->add_option("--test-normal-source", synth.test_normal_source);
  synth_cmd->add_option("--test-normal-target", synth.test_normal_target);
  synth_cmd->add_option("--test-normal-unseen", synth.test_normal_unseen,
                        "test normals from a cluster absent from training");
  synth_cmd->add_option("--test-anomalous", synth.test_anomalous);
  synth_cmd->add_option("--anomaly-clusters", synth.anomaly_clusters);
  synth_cmd->add_option("--spread", synth.spread, "expected noise radius per cluster");
  synth_cmd->add_option("--target-shift", synth.target_shift);
  synth_cmd->add_option("--anomaly-shift", synth.anomaly_shift);
  synth_cmd->add_option("--unseen-shift", synth.unseen_shift);
  synth_cmd->add_option("--anomaly-coherence", synth.anomaly_coherence,
                        "cosine between anomaly shift directions");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "run the prequential active-learning experiment grid");
  add_hyperparameters(run_cmd, run);
  run_cmd->add_option("--out", run.out, "output directory for results.csv and summary.json");
  run_cmd->add_option("--strategy", run.strategy, "hybrid, random, qbc (comma list allowed)");
  run_cmd->add_option("--budget", run.budget, "single labeling budget");
  run_cmd->add_option("--budgets", run.budgets, "comma-separated labeling budgets");
  run_cmd->add_option("--trials", run.trials, "trials per cell");
  run_cmd->add_option("--alpha", run.alpha, "threshold adjustment parameter");
  run_cmd->add_option("--window", run.window, "budget moving-average window");
  run_cmd->add_option("--upsilon", run.upsilon, "fixed hybrid mixing threshold (ablation)");
  run_cmd->add_option("--committee-size", run.committee_size, "QBC committee size");
  run_cmd->add_option("--inclusion-rate", run.inclusion_rate, "QBC member inclusion rate");
  run_cmd->add_flag("--rebuild-committee", run.rebuild_committee,
                    "resample QBC members from the full labeled pool after each label");
  run_cmd->add_option("--threads", run.threads, "worker threads (0 = all cores)");

  std::string results_path, report_out;
  auto* report_cmd = app.add_subcommand("report", "aggregate a persisted results CSV");
  report_cmd->add_option("--results,results", results_path, "results CSV")->required();
  report_cmd->add_option("--out", report_out, "directory for summary.json (default: print to stdout)");

  RunOptions score;
  auto* score_cmd = app.add_subcommand("score", "offline scoring of a test set against training data");
  add_hyperparameters(score_cmd, score);
  score_cmd->add_option("--out", score.out, "write per-sample scores here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, synth_out);
    if (*run_cmd) return cmd_run(run);
    if (*report_cmd) return cmd_report(results_path, report_out);
    if (*score_cmd) return cmd_score(score);
  } catch (const asdal::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const asdal::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const asdal::TrialError& e) {
    std::cerr << "trial failure: " << e.what() << '\n';
    return kTrial;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kTrial;
  }
  return kUsage;
}
