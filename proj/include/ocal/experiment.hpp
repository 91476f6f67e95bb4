// experiment.hpp - dataset ingestion, synthetic data, hyperparameter
// cross-validation, multi-seed orchestration and results persistence.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ocal/data.hpp"
#include "ocal/density.hpp"
#include "ocal/io.hpp"
#include "ocal/loop.hpp"
#include "ocal/metrics.hpp"
#include "ocal/rng.hpp"
#include "ocal/strategies.hpp"
#include "ocal/svdd.hpp"

namespace ocal {

// Two isotropic Gaussian clouds with truth labels attached; the desk-scale
// stand-in for the retrieval datasets the protocol was designed around.
struct SyntheticSpec {
  int n_target = 100;
  int n_outlier = 100;
  int d = 2;
  std::vector<double> target_mean{0.0};   // scalar broadcasts over d
  std::vector<double> outlier_mean{5.0};
  double target_scale = 1.0;
  double outlier_scale = 1.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<double> resolve_mean(const std::vector<double>& mean, int d, const char* which) {
  if (static_cast<int>(mean.size()) == d) return mean;
  if (mean.size() == 1) return std::vector<double>(static_cast<std::size_t>(d), mean.front());
  throw ValidationError(std::string("synthetic ") + which + " mean must have 1 or d entries");
}

}  // namespace detail

inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_target < 1 || spec.n_outlier < 1)
    throw ValidationError("generate_synthetic: counts must be at least 1");
  if (spec.d < 1) throw ValidationError("generate_synthetic: dimension must be at least 1");
  if (!(spec.target_scale > 0.0) || !(spec.outlier_scale > 0.0))
    throw ValidationError("generate_synthetic: scales must be positive");
  const std::vector<double> mt = detail::resolve_mean(spec.target_mean, spec.d, "target");
  const std::vector<double> mo = detail::resolve_mean(spec.outlier_mean, spec.d, "outlier");

  SplitMix64 rng(spec.seed);
  Dataset d;
  d.truth = std::vector<Label>{};
  auto emit = [&](const std::vector<double>& mean, double scale, int count, Label label) {
    for (int i = 0; i < count; ++i) {
      Sample s;
      s.id = static_cast<int>(d.samples.size());
      s.x.resize(static_cast<std::size_t>(spec.d));
      for (int j = 0; j < spec.d; ++j)
        s.x[static_cast<std::size_t>(j)] = mean[static_cast<std::size_t>(j)] + scale * rng.next_gaussian();
      d.samples.push_back(std::move(s));
      d.truth->push_back(label);
    }
  };
  emit(mt, spec.target_scale, spec.n_target, Label::Positive);
  emit(mo, spec.outlier_scale, spec.n_outlier, Label::Negative);
  return d;
}

// Z-scores every feature in place (optional preprocessing, off by default).
inline void standardize_features(Dataset& d) {
  const int dim = d.dim();
  const double n = static_cast<double>(d.size());
  if (n < 2) return;
  for (int j = 0; j < dim; ++j) {
    double mean = 0.0;
    for (const Sample& s : d.samples) mean += s.x[static_cast<std::size_t>(j)];
    mean /= n;
    double ss = 0.0;
    for (const Sample& s : d.samples) {
      const double v = s.x[static_cast<std::size_t>(j)] - mean;
      ss += v * v;
    }
    double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) sd = 1.0;
    for (Sample& s : d.samples) s.x[static_cast<std::size_t>(j)] = (s.x[static_cast<std::size_t>(j)] - mean) / sd;
  }
}

struct ExperimentConfig {
  std::string dataset_path;  // empty means synthetic
  std::string format;        // "csv", "svmlight" or "" (guess by extension)
  std::optional<double> target_class;
  bool standardize = false;
  SyntheticSpec synthetic;

  std::size_t pool_size = 200;
  double train_fraction = 0.5;
  std::vector<StrategyKind> strategies;
  int budget = 25;
  std::vector<std::uint64_t> seeds;

  std::vector<double> bandwidth_grid;             // empty: auto around rule of thumb
  std::vector<double> c_grid{0.01, 0.1, 1.0, 10.0};
  std::vector<double> gamma_grid;                 // empty: powers of two, variance-scaled
  StrategyParams params;
  std::string output_dir = "out";
};

inline std::vector<StrategyKind> all_strategies() {
  return {StrategyKind::Random, StrategyKind::MaxRelevance, StrategyKind::NeighborhoodSvdd,
          StrategyKind::ExpectedMargin, StrategyKind::ExpectedEntropy};
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

inline double config_number(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!parse_number(value, v)) throw ValidationError("config key '" + key + "': bad number '" + value + "'");
  return v;
}

inline bool config_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ValidationError("config key '" + key + "': expected true or false, got '" + value + "'");
}

}  // namespace detail

// Flat key = value text, '#' starts a comment. Unknown keys are rejected so
// typos fail loudly. Seeds accept either a comma list or an a:b range.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (key == "dataset") {
      if (value != "synthetic") cfg.dataset_path = value;
    } else if (key == "format") {
      if (value != "csv" && value != "svmlight")
        throw ValidationError("config key 'format': expected csv or svmlight");
      cfg.format = value;
    } else if (key == "target_class") {
      cfg.target_class = detail::config_number(key, value);
    } else if (key == "standardize") {
      cfg.standardize = detail::config_bool(key, value);
    } else if (key == "pool_size") {
      cfg.pool_size = static_cast<std::size_t>(detail::config_number(key, value));
    } else if (key == "train_fraction") {
      cfg.train_fraction = detail::config_number(key, value);
    } else if (key == "strategies") {
      cfg.strategies.clear();
      if (value == "all") {
        cfg.strategies = all_strategies();
      } else {
        for (const auto& name : detail::split_list(value)) cfg.strategies.push_back(parse_strategy(name));
      }
    } else if (key == "budget") {
      cfg.budget = static_cast<int>(detail::config_number(key, value));
    } else if (key == "seeds") {
      cfg.seeds.clear();
      const std::size_t colon = value.find(':');
      if (colon != std::string::npos) {
        const auto lo = static_cast<std::uint64_t>(detail::config_number(key, value.substr(0, colon)));
        const auto hi = static_cast<std::uint64_t>(detail::config_number(key, value.substr(colon + 1)));
        if (hi < lo) throw ValidationError("config key 'seeds': empty range");
        for (std::uint64_t s = lo; s <= hi; ++s) cfg.seeds.push_back(s);
      } else {
        for (const auto& tok : detail::split_list(value))
          cfg.seeds.push_back(static_cast<std::uint64_t>(detail::config_number(key, tok)));
      }
    } else if (key == "bandwidth_grid") {
      cfg.bandwidth_grid.clear();
      for (const auto& tok : detail::split_list(value)) cfg.bandwidth_grid.push_back(detail::config_number(key, tok));
    } else if (key == "c_grid") {
      cfg.c_grid.clear();
      for (const auto& tok : detail::split_list(value)) cfg.c_grid.push_back(detail::config_number(key, tok));
    } else if (key == "gamma_grid") {
      cfg.gamma_grid.clear();
      for (const auto& tok : detail::split_list(value)) cfg.gamma_grid.push_back(detail::config_number(key, tok));
    } else if (key == "sigma") {
      cfg.params.sigma = detail::config_number(key, value);
    } else if (key == "c") {
      cfg.params.c = detail::config_number(key, value);
    } else if (key == "k") {
      cfg.params.k = static_cast<int>(detail::config_number(key, value));
    } else if (key == "margin_variant") {
      if (value == "paper")
        cfg.params.margin_variant = MarginVariant::Paper;
      else if (value == "exact")
        cfg.params.margin_variant = MarginVariant::Exact;
      else
        throw ValidationError("config key 'margin_variant': expected paper or exact");
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "synthetic.n_target") {
      cfg.synthetic.n_target = static_cast<int>(detail::config_number(key, value));
    } else if (key == "synthetic.n_outlier") {
      cfg.synthetic.n_outlier = static_cast<int>(detail::config_number(key, value));
    } else if (key == "synthetic.d") {
      cfg.synthetic.d = static_cast<int>(detail::config_number(key, value));
    } else if (key == "synthetic.target_mean") {
      cfg.synthetic.target_mean.clear();
      for (const auto& tok : detail::split_list(value)) cfg.synthetic.target_mean.push_back(detail::config_number(key, tok));
    } else if (key == "synthetic.outlier_mean") {
      cfg.synthetic.outlier_mean.clear();
      for (const auto& tok : detail::split_list(value)) cfg.synthetic.outlier_mean.push_back(detail::config_number(key, tok));
    } else if (key == "synthetic.target_scale") {
      cfg.synthetic.target_scale = detail::config_number(key, value);
    } else if (key == "synthetic.outlier_scale") {
      cfg.synthetic.outlier_scale = detail::config_number(key, value);
    } else if (key == "synthetic.seed") {
      cfg.synthetic.seed = static_cast<std::uint64_t>(detail::config_number(key, value));
    } else {
      throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (cfg.strategies.empty()) throw ValidationError("config: no strategies given");
  if (cfg.seeds.empty()) throw ValidationError("config: no seeds given");
  if (cfg.budget < 1) throw ValidationError("config: budget must be at least 1");
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  return parse_config(in);
}

inline Dataset load_experiment_dataset(const ExperimentConfig& cfg) {
  Dataset d;
  if (cfg.dataset_path.empty()) {
    d = generate_synthetic(cfg.synthetic);
  } else {
    const bool svm = cfg.format == "svmlight" ||
                     (cfg.format.empty() && cfg.dataset_path.find(".svm") != std::string::npos);
    d = svm ? load_svmlight_detailed(cfg.dataset_path, cfg.target_class).dataset
            : load_csv_detailed(cfg.dataset_path, cfg.target_class).dataset;
  }
  if (cfg.standardize) standardize_features(d);
  const ValidationReport rep = validate_dataset(d);
  if (!rep.ok) throw ValidationError("dataset invalid: " + rep.problems.front());
  return d;
}

// Tuned model settings plus the ids whose features the tuning looked at
// (kept so tests can assert the test split stayed untouched).
struct TunedHyper {
  ModelHyper hyper;
  std::vector<int> used_ids;
};

namespace detail {

inline std::vector<double> auto_bandwidth_grid(const std::vector<std::vector<double>>& points) {
  const double rot = silverman_bandwidth(points);
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i)
    grid.push_back(rot * std::pow(10.0, -1.0 + 2.0 * static_cast<double>(i) / 9.0));
  return grid;
}

inline double select_bandwidth(const std::vector<std::vector<double>>& points,
                               const std::vector<double>& grid) {
  if (points.size() < 2) return silverman_bandwidth(points);
  const std::vector<double> g = grid.empty() ? auto_bandwidth_grid(points) : grid;
  const std::optional<double> h = select_bandwidth_loo(points, g);
  return h ? *h : silverman_bandwidth(points);
}

inline double mean_feature_variance(const std::vector<std::vector<double>>& points) {
  if (points.size() < 2) return 1.0;
  const std::size_t d = points.front().size();
  const double n = static_cast<double>(points.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (const auto& p : points) mean += p[j];
    mean /= n;
    double ss = 0.0;
    for (const auto& p : points) ss += (p[j] - mean) * (p[j] - mean);
    acc += ss / (n - 1.0);
  }
  const double v = acc / static_cast<double>(d);
  return v > 0.0 ? v : 1.0;
}

}  // namespace detail

// Cross-validation uses only training-side data. Bandwidths maximize the
// leave-one-out likelihood on their own fitting sets; (gamma, C) come from a
// grid search on a 20% holdout of P, preferring the model whose holdout
// acceptance rate is closest to 0.95 (no negatives exist to score against at
// tuning time).
inline TunedHyper tune_hyperparameters(const Dataset& d, const PoolState& pool,
                                       const ExperimentConfig& cfg, std::uint64_t seed) {
  TunedHyper t;
  const std::vector<std::vector<double>> pos = detail::features_of(d, pool.positives);
  std::vector<int> all_ids = pool.unlabeled;
  all_ids.insert(all_ids.end(), pool.positives.begin(), pool.positives.end());
  all_ids.insert(all_ids.end(), pool.negatives.begin(), pool.negatives.end());
  const std::vector<std::vector<double>> all = detail::features_of(d, all_ids);

  t.used_ids = pool.positives;
  t.used_ids.insert(t.used_ids.end(), all_ids.begin(), all_ids.end());
  std::sort(t.used_ids.begin(), t.used_ids.end());
  t.used_ids.erase(std::unique(t.used_ids.begin(), t.used_ids.end()), t.used_ids.end());

  t.hyper.h_pos = detail::select_bandwidth(pos, cfg.bandwidth_grid);
  t.hyper.h_all = detail::select_bandwidth(all, cfg.bandwidth_grid);

  const double gamma_base = 1.0 / (static_cast<double>(d.dim()) * detail::mean_feature_variance(pos));
  std::vector<double> gammas = cfg.gamma_grid;
  if (gammas.empty())
    for (int e = -6; e <= 4; ++e) gammas.push_back(std::ldexp(gamma_base, e));

  t.hyper.kernel = KernelSpec{KernelKind::RBF, gamma_base};
  t.hyper.c_pos = std::max(1.0, 2.0 / static_cast<double>(std::max<std::size_t>(pos.size(), 1)));
  t.hyper.c_neg = t.hyper.c_pos;
  if (pos.size() < 2) return t;

  SplitMix64 rng(mix_seed(seed, 0xc7));
  const std::vector<int> order =
      sample_without_replacement(static_cast<int>(pos.size()), static_cast<int>(pos.size()), rng);
  const std::size_t n_hold = std::max<std::size_t>(1, pos.size() / 5);
  std::vector<std::vector<double>> hold, train;
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_hold ? hold : train).push_back(pos[static_cast<std::size_t>(order[i])]);

  double best_score = std::numeric_limits<double>::infinity();
  for (double gamma : gammas) {
    for (double c : cfg.c_grid) {
      if (c * static_cast<double>(train.size()) < 1.0) continue;  // sum constraint unreachable
      SvddModel m;
      try {
        m = train_svdd(train, {}, KernelSpec{KernelKind::RBF, gamma}, c, c);
      } catch (const SolverError&) {
        continue;
      }
      std::size_t accepted = 0;
      for (const auto& x : hold)
        if (svdd_predict(m, x) == Label::Positive) ++accepted;
      const double rate = static_cast<double>(accepted) / static_cast<double>(hold.size());
      const double score = std::abs(rate - 0.95);
      if (score < best_score) {
        best_score = score;
        t.hyper.kernel = KernelSpec{KernelKind::RBF, gamma};
        t.hyper.c_pos = c;
        t.hyper.c_neg = c;
      }
    }
  }
  return t;
}

struct ExperimentSummary {
  std::vector<AggregateRecord> aggregates;        // one row per strategy, config order
  std::vector<std::vector<double>> gains;         // [strategy index][seed index]
  std::vector<std::string> trace_files;
  std::string summary_file;
  std::string curve_file;
};

namespace detail {

inline void write_trace(const std::string& path, const LoopResult& res) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (const RoundRecord& r : res.rounds) {
    nlohmann::json j;
    j["round"] = r.round;
    j["selected_id"] = r.selected_id;
    j["answer"] = label_name(r.oracle_answer);
    j["tp"] = r.metrics.tp;
    j["fp"] = r.metrics.fp;
    j["fn"] = r.metrics.fn;
    j["tn"] = r.metrics.tn;
    j["precision"] = r.metrics.precision;
    j["recall"] = r.metrics.recall;
    j["f1"] = r.metrics.f1;
    out << j.dump() << '\n';
  }
}

inline std::string format_fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

}  // namespace detail

// The full protocol: per seed, split and cross-validate; per strategy, run
// the loop against the ground-truth oracle; persist traces as they finish,
// then the aggregate table and the precision-by-round plot data.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  const Dataset dataset = load_experiment_dataset(cfg);
  std::filesystem::create_directories(cfg.output_dir);

  ExperimentSummary summary;
  summary.gains.assign(cfg.strategies.size(), {});
  // curve[strategy][round] accumulates metrics over seeds; round 0 is the baseline
  std::vector<std::vector<double>> precision_acc(cfg.strategies.size(),
                                                 std::vector<double>(static_cast<std::size_t>(cfg.budget) + 1, 0.0));
  std::vector<std::vector<double>> f1_acc = precision_acc;

  for (std::uint64_t seed : cfg.seeds) {
    const SplitSpec split{cfg.pool_size, cfg.train_fraction, seed};
    const PoolState pool = protocol_split(dataset, split);
    const TunedHyper tuned = tune_hyperparameters(dataset, pool, cfg, seed);

    for (std::size_t si = 0; si < cfg.strategies.size(); ++si) {
      LoopConfig lc;
      lc.budget = cfg.budget;
      lc.strategy = cfg.strategies[si];
      lc.params = cfg.params;
      lc.params.random_seed = seed;
      GroundTruthOracle oracle(dataset);
      const LoopResult res = run_loop(dataset, pool, lc, oracle, tuned.hyper);

      summary.gains[si].push_back(gain(res.rounds, res.baseline));
      precision_acc[si][0] += res.baseline.precision;
      f1_acc[si][0] += res.baseline.f1;
      for (const RoundRecord& r : res.rounds) {
        precision_acc[si][static_cast<std::size_t>(r.round)] += r.metrics.precision;
        f1_acc[si][static_cast<std::size_t>(r.round)] += r.metrics.f1;
      }

      const std::string path = cfg.output_dir + "/trace_" +
                               strategy_name(cfg.strategies[si]) + "_seed" + std::to_string(seed) +
                               ".jsonl";
      detail::write_trace(path, res);
      summary.trace_files.push_back(path);
    }
  }

  summary.summary_file = cfg.output_dir + "/summary.csv";
  {
    std::ofstream out(summary.summary_file);
    if (!out) throw ValidationError("cannot write '" + summary.summary_file + "'");
    out << "strategy,mean_gain,std_gain,n_seeds\n";
    for (std::size_t si = 0; si < cfg.strategies.size(); ++si) {
      AggregateRecord agg;
      if (summary.gains[si].size() >= 2) {
        agg = aggregate_runs(summary.gains[si], cfg.strategies[si]);
        out << strategy_name(cfg.strategies[si]) << ',' << detail::format_fixed(agg.mean_gain)
            << ',' << detail::format_fixed(agg.std_gain) << ',' << agg.n_seeds << '\n';
      } else {
        agg.strategy = cfg.strategies[si];
        agg.mean_gain = summary.gains[si].empty() ? 0.0 : summary.gains[si].front();
        agg.n_seeds = summary.gains[si].size();
        out << strategy_name(cfg.strategies[si]) << ',' << detail::format_fixed(agg.mean_gain)
            << ",," << agg.n_seeds << '\n';
      }
      summary.aggregates.push_back(agg);
    }
  }

  summary.curve_file = cfg.output_dir + "/precision_by_round.csv";
  {
    std::ofstream out(summary.curve_file);
    if (!out) throw ValidationError("cannot write '" + summary.curve_file + "'");
    out << "strategy,round,mean_precision,mean_f1\n";
    const double n = static_cast<double>(cfg.seeds.size());
    for (std::size_t si = 0; si < cfg.strategies.size(); ++si)
      for (int r = 0; r <= cfg.budget; ++r)
        out << strategy_name(cfg.strategies[si]) << ',' << r << ','
            << detail::format_fixed(precision_acc[si][static_cast<std::size_t>(r)] / n) << ','
            << detail::format_fixed(f1_acc[si][static_cast<std::size_t>(r)] / n) << '\n';
  }
  return summary;
}

// The built-in benchmark: two Gaussian clouds in five dimensions, pool 200,
// matched to the 25-query comparison protocol.
inline ExperimentConfig make_bench_config(std::size_t n_seeds, int budget,
                                          const std::vector<StrategyKind>& strategies,
                                          const std::string& output_dir) {
  ExperimentConfig cfg;
  cfg.synthetic.n_target = 300;
  cfg.synthetic.n_outlier = 700;
  cfg.synthetic.d = 5;
  cfg.synthetic.target_mean = {0.0};
  cfg.synthetic.outlier_mean = {2.0, 0.0, 0.0, 0.0, 0.0};
  cfg.synthetic.target_scale = 1.0;
  cfg.synthetic.outlier_scale = 2.0;
  cfg.synthetic.seed = 20240101;
  cfg.pool_size = 200;
  cfg.train_fraction = 0.5;
  cfg.strategies = strategies.empty() ? all_strategies() : strategies;
  cfg.budget = budget;
  for (std::uint64_t s = 1; s <= n_seeds; ++s) cfg.seeds.push_back(s);
  cfg.output_dir = output_dir;
  return cfg;
}

}  // namespace ocal
