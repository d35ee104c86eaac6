#include "asdal/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "asdal/dataset_io.hpp"
#include "asdal/metrics.hpp"
#include "asdal/statistics.hpp"

namespace asdal {
namespace {

using json = nlohmann::json;

template <typename T>
T json_get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config key '") + key + "': " + ex.what());
  }
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw DataError("not an unsigned integer: '" + std::string(text) + "'");
  }
  return v;
}

std::optional<double> parse_optional_real(std::string_view text) {
  if (text.empty()) return std::nullopt;
  return parse_real(text);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

struct Cell {
  std::size_t machine = 0;
  StrategyKind kind = StrategyKind::Hybrid;
  double budget = 0.0;
  std::size_t trial = 0;
};

std::string describe(const std::string& machine, const Cell& c) {
  return "machine=" + machine + " strategy=" + std::string(to_string(c.kind)) +
         " budget=" + format_real(c.budget) + " trial=" + std::to_string(c.trial);
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"auc_source",  "auc_target",  "auc_mixed",
                                              "pauc_source", "pauc_target", "pauc_mixed"};
  return names;
}

std::optional<double> metric_of(const ResultRow& r, const std::string& name) {
  if (name == "auc_source") return r.auc_source;
  if (name == "auc_target") return r.auc_target;
  if (name == "auc_mixed") return r.auc_mixed;
  if (name == "pauc_source") return r.pauc_source;
  if (name == "pauc_target") return r.pauc_target;
  if (name == "pauc_mixed") return r.pauc_mixed;
  if (name == "query_fraction") return r.query_fraction;
  return std::nullopt;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.strategies.empty()) throw ConfigError("experiment needs at least one strategy");
  if (cfg.budgets.empty()) throw ConfigError("experiment needs at least one budget");
  for (double b : cfg.budgets) {
    if (!(b >= 0.0 && b < 1.0)) throw ConfigError("budgets must lie in [0, 1)");
  }
  if (cfg.trials == 0) throw ConfigError("trials must be at least 1");
  validate(cfg.scorer);
  if (!(cfg.initial_quantile > 0.0 && cfg.initial_quantile < 1.0)) {
    throw ConfigError("initial_quantile must lie in (0, 1)");
  }
  if (!(cfg.max_fpr > 0.0 && cfg.max_fpr <= 1.0)) throw ConfigError("max_fpr must lie in (0, 1]");
  if (cfg.kmeans.k == 0) throw ConfigError("kmeans k must be positive");
  if (!(cfg.kmeans.tolerance > 0.0)) throw ConfigError("kmeans tolerance must be positive");
  if (cfg.kmeans.max_iterations == 0) throw ConfigError("kmeans max_iterations must be positive");
  HybridConfig hybrid{0.5, cfg.strategy.alpha, cfg.strategy.window, cfg.strategy.upsilon};
  validate(hybrid);
  QbcConfig qbc{0.5, cfg.strategy.committee_size, cfg.strategy.inclusion_rate,
                cfg.strategy.quantile_window, cfg.strategy.window, cfg.strategy.rebuild_committee};
  validate(qbc);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError("config '" + path.string() + "': " + ex.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  static const std::set<std::string> known{
      "train",          "test",          "dataset",        "out",
      "strategies",     "budgets",       "trials",         "seed",
      "gamma",          "alpha",         "window",         "upsilon",
      "committee_size", "inclusion_rate", "quantile_window", "rebuild_committee",
      "kmeans_k",       "kmeans_iterations", "kmeans_tolerance", "target_references",
      "initial_quantile", "max_fpr",     "decision_threshold", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  ExperimentConfig cfg;
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  if (j.contains("train")) cfg.train_path = resolve(json_get<std::string>(j, "train"));
  if (j.contains("test")) cfg.test_path = resolve(json_get<std::string>(j, "test"));
  if (j.contains("dataset")) cfg.test_path = resolve(json_get<std::string>(j, "dataset"));
  if (j.contains("out")) cfg.output_dir = resolve(json_get<std::string>(j, "out"));
  if (j.contains("strategies")) {
    cfg.strategies.clear();
    for (const auto& name : json_get<std::vector<std::string>>(j, "strategies")) {
      cfg.strategies.push_back(parse_strategy(name));
    }
  }
  if (j.contains("budgets")) cfg.budgets = json_get<std::vector<double>>(j, "budgets");
  if (j.contains("trials")) cfg.trials = json_get<std::size_t>(j, "trials");
  if (j.contains("seed")) cfg.base_seed = json_get<std::uint64_t>(j, "seed");
  if (j.contains("gamma")) cfg.scorer.gamma = json_get<double>(j, "gamma");
  if (j.contains("alpha")) cfg.strategy.alpha = json_get<double>(j, "alpha");
  if (j.contains("window")) cfg.strategy.window = json_get<std::size_t>(j, "window");
  if (j.contains("upsilon")) cfg.strategy.upsilon = json_get<double>(j, "upsilon");
  if (j.contains("committee_size")) {
    cfg.strategy.committee_size = json_get<std::size_t>(j, "committee_size");
  }
  if (j.contains("inclusion_rate")) {
    cfg.strategy.inclusion_rate = json_get<double>(j, "inclusion_rate");
  }
  if (j.contains("quantile_window")) {
    cfg.strategy.quantile_window = json_get<std::size_t>(j, "quantile_window");
  }
  if (j.contains("rebuild_committee")) {
    cfg.strategy.rebuild_committee = json_get<bool>(j, "rebuild_committee");
  }
  if (j.contains("kmeans_k")) cfg.kmeans.k = json_get<std::size_t>(j, "kmeans_k");
  if (j.contains("kmeans_iterations")) {
    cfg.kmeans.max_iterations = json_get<std::size_t>(j, "kmeans_iterations");
  }
  if (j.contains("kmeans_tolerance")) cfg.kmeans.tolerance = json_get<double>(j, "kmeans_tolerance");
  if (j.contains("target_references")) {
    cfg.target_references = json_get<std::size_t>(j, "target_references");
  }
  if (j.contains("initial_quantile")) cfg.initial_quantile = json_get<double>(j, "initial_quantile");
  if (j.contains("max_fpr")) cfg.max_fpr = json_get<double>(j, "max_fpr");
  if (j.contains("decision_threshold")) {
    cfg.decision_threshold = json_get<double>(j, "decision_threshold");
  }
  if (j.contains("threads")) cfg.threads = json_get<std::size_t>(j, "threads");
  return cfg;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::string_view machine,
                         std::string_view strategy, double budget, std::size_t trial) {
  return SeedHasher(base_seed)
      .add("trial")
      .add(machine)
      .add(strategy)
      .add(budget)
      .add(static_cast<std::uint64_t>(trial))
      .finish();
}

MachineModel build_machine_model(std::span<const Sample> train, const std::string& machine,
                                 const ExperimentConfig& cfg) {
  std::vector<Embedding> source, target_refs, labeled;
  for (const auto& s : train) {
    if (s.machine != machine || s.label != Label::Normal) continue;
    labeled.push_back(s.embedding);
    if (s.domain == Domain::Source) {
      source.push_back(s.embedding);
    } else if (target_refs.size() < cfg.target_references) {
      target_refs.push_back(s.embedding);
    }
  }
  if (labeled.empty()) {
    throw DataError("no normal training samples for machine '" + machine + "'");
  }
  if (source.size() < cfg.kmeans.k) {
    throw DataError("machine '" + machine + "' has " + std::to_string(source.size()) +
                    " source training normals, fewer than k = " + std::to_string(cfg.kmeans.k));
  }
  KMeansConfig km = cfg.kmeans;
  km.seed = SeedHasher(cfg.base_seed).add("kmeans").add(machine).finish();
  return MachineModel{machine, build_initial_reference(source, target_refs, km),
                      std::move(labeled)};
}

TrialLog run_trial(const MachineModel& model, std::span<const Sample> test, StrategyKind kind,
                   double budget, std::size_t trial, const ExperimentConfig& cfg) {
  const std::uint64_t seed =
      trial_seed(cfg.base_seed, model.machine, to_string(kind), budget, trial);

  std::vector<Sample> stream;
  for (const auto& s : test) {
    if (s.machine == model.machine) stream.push_back(s);
  }
  Rng shuffler(seed);
  shuffler.shuffle(stream);

  EngineConfig ecfg;
  ecfg.scorer = cfg.scorer;
  ecfg.strategy = cfg.strategy;
  ecfg.strategy.kind = kind;
  ecfg.strategy.budget = budget;
  ecfg.initial_quantile = cfg.initial_quantile;
  ecfg.decision_threshold = cfg.decision_threshold;

  StreamEngine engine(model.refs, model.labeled_normals, ecfg, splitmix64(seed));
  DatasetOracle oracle(stream);
  TrialLog log = engine.run_stream(stream, oracle);
  log.seed = seed;
  return log;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg, std::span<const Sample> train,
                                      std::span<const Sample> test) {
  validate(cfg);
  std::vector<std::string> machines = machines_of(test);
  if (machines.empty()) throw DataError("test dataset holds no samples");
  std::sort(machines.begin(), machines.end());

  std::vector<MachineModel> models;
  models.reserve(machines.size());
  for (const auto& m : machines) models.push_back(build_machine_model(train, m, cfg));

  std::vector<Cell> cells;
  for (std::size_t m = 0; m < machines.size(); ++m) {
    for (StrategyKind kind : cfg.strategies) {
      for (double b : cfg.budgets) {
        for (std::size_t t = 0; t < cfg.trials; ++t) cells.push_back({m, kind, b, t});
      }
    }
  }

  std::vector<ResultRow> rows(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      try {
        const TrialLog log = run_trial(models[c.machine], test, c.kind, c.budget, c.trial, cfg);
        const DomainMetrics dm = evaluate(log, cfg.max_fpr);
        ResultRow& r = rows[i];
        r.machine = machines[c.machine];
        r.strategy = std::string(to_string(c.kind));
        r.budget = c.budget;
        r.trial = c.trial;
        r.seed = log.seed;
        r.auc_source = dm.auc_source;
        r.auc_target = dm.auc_target;
        r.auc_mixed = dm.auc_mixed;
        r.pauc_source = dm.pauc_source;
        r.pauc_target = dm.pauc_target;
        r.pauc_mixed = dm.pauc_mixed;
        r.query_fraction = log.query_fraction();
        r.final_normal = log.final_normal;
        r.final_anomalous = log.final_anomalous;
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
        if (errors[i].empty()) errors[i] = "unknown error";
      }
    }
  };

  std::size_t threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, cells.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i].empty()) {
      throw TrialError("trial failed (" + describe(machines[cells[i].machine], cells[i]) +
                       "): " + errors[i]);
    }
  }
  sort_rows(rows);
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.train_path.empty() || cfg.test_path.empty()) {
    throw ConfigError("experiment needs both a training and a test dataset");
  }
  const auto train = load_dataset(cfg.train_path);
  const auto test = load_dataset(cfg.test_path);
  return run_experiment(cfg, train, test);
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.machine, a.strategy, a.budget, a.trial) <
           std::tie(b.machine, b.strategy, b.budget, b.trial);
  });
}

void write_results(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.machine << ',' << r.strategy << ',' << format_real(r.budget) << ',' << r.trial << ','
        << r.seed << ',' << format_optional(r.auc_source) << ',' << format_optional(r.auc_target)
        << ',' << format_optional(r.auc_mixed) << ',' << format_optional(r.pauc_source) << ','
        << format_optional(r.pauc_target) << ',' << format_optional(r.pauc_mixed) << ','
        << format_real(r.query_fraction) << ',' << r.final_normal << ',' << r.final_anomalous
        << '\n';
  }
}

std::vector<ResultRow> read_results(std::istream& in, std::string_view source_name) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string(source_name) + ": empty results file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) {
    throw DataError(std::string(source_name) + ":1: unexpected results header");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    const std::string at = std::string(source_name) + ":" + std::to_string(line_no) + ": ";
    if (f.size() != 14) throw DataError(at + "expected 14 fields");
    try {
      ResultRow r;
      r.machine = std::string(f[0]);
      r.strategy = std::string(f[1]);
      r.budget = parse_real(f[2]);
      r.trial = parse_u64(f[3]);
      r.seed = parse_u64(f[4]);
      r.auc_source = parse_optional_real(f[5]);
      r.auc_target = parse_optional_real(f[6]);
      r.auc_mixed = parse_optional_real(f[7]);
      r.pauc_source = parse_optional_real(f[8]);
      r.pauc_target = parse_optional_real(f[9]);
      r.pauc_mixed = parse_optional_real(f[10]);
      r.query_fraction = parse_real(f[11]);
      r.final_normal = parse_u64(f[12]);
      r.final_anomalous = parse_u64(f[13]);
      rows.push_back(std::move(r));
    } catch (const DataError& ex) {
      throw DataError(at + ex.what());
    }
  }
  return rows;
}

std::vector<ResultRow> load_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results '" + path.string() + "'");
  return read_results(in, path.string());
}

Summary summarize(std::span<const ResultRow> input) {
  if (input.empty()) throw ConfigError("no result rows to summarize");
  std::vector<ResultRow> rows(input.begin(), input.end());
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.strategy, a.budget, a.machine, a.trial) <
           std::tie(b.strategy, b.budget, b.machine, b.trial);
  });

  std::vector<std::string> per_cell = metric_names();
  per_cell.push_back("query_fraction");

  Summary out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].strategy == rows[i].strategy &&
           rows[j].budget == rows[i].budget && rows[j].machine == rows[i].machine) {
      ++j;
    }
    CellSummary cell{rows[i].strategy, rows[i].budget, rows[i].machine, {}};
    for (const auto& name : per_cell) {
      std::vector<double> values;
      for (std::size_t k = i; k < j; ++k) {
        if (auto v = metric_of(rows[k], name)) values.push_back(*v);
      }
      if (values.empty()) continue;
      const MeanInterval mi = ci95(values);
      cell.metrics[name] = MetricSummary{mi.mean, mi.half_width, values.size()};
    }
    out.cells.push_back(std::move(cell));
    i = j;
  }

  std::size_t c = 0;
  while (c < out.cells.size()) {
    std::size_t d = c;
    while (d < out.cells.size() && out.cells[d].strategy == out.cells[c].strategy &&
           out.cells[d].budget == out.cells[c].budget) {
      ++d;
    }
    AggregateSummary agg{out.cells[c].strategy, out.cells[c].budget, {}, d - c};
    for (const auto& name : metric_names()) {
      std::vector<double> means;
      bool positive = true;
      for (std::size_t k = c; k < d; ++k) {
        const auto it = out.cells[k].metrics.find(name);
        if (it == out.cells[k].metrics.end()) continue;
        means.push_back(it->second.mean);
        positive = positive && it->second.mean > 0.0;
      }
      agg.harmonic_means[name] =
          means.empty() || !positive ? std::nullopt : std::optional(harmonic_mean(means));
    }
    out.aggregates.push_back(std::move(agg));
    c = d;
  }
  return out;
}

std::string summary_to_json(const Summary& summary) {
  using ojson = nlohmann::ordered_json;
  ojson root;
  ojson cells = ojson::array();
  for (const auto& cell : summary.cells) {
    ojson m = ojson::object();
    for (const auto& [name, ms] : cell.metrics) {
      m[name] = ojson{{"mean", ms.mean},
                      {"ci95", ms.ci95_half_width ? ojson(*ms.ci95_half_width) : ojson(nullptr)},
                      {"n", ms.n}};
    }
    cells.push_back(ojson{{"strategy", cell.strategy},
                          {"budget", cell.budget},
                          {"machine", cell.machine},
                          {"metrics", std::move(m)}});
  }
  ojson aggs = ojson::array();
  for (const auto& agg : summary.aggregates) {
    ojson h = ojson::object();
    for (const auto& [name, v] : agg.harmonic_means) h[name] = v ? ojson(*v) : ojson(nullptr);
    aggs.push_back(ojson{{"strategy", agg.strategy},
                         {"budget", agg.budget},
                         {"machines", agg.machines},
                         {"harmonic_mean", std::move(h)}});
  }
  root["cells"] = std::move(cells);
  root["aggregates"] = std::move(aggs);
  return root.dump(2) + "\n";
}

}  // namespace asdal
