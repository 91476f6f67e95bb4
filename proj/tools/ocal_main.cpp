// ocal_main.cpp - command line interface.
//
//   ocal run    --config experiment.cfg
//   ocal bench  --synthetic [--seeds N] [--budget N] [--strategies all] [--out DIR]
//   ocal label  --dataset pool.csv --strategy margin --budget K
//   ocal info   --dataset data.csv
//
// Exit codes: 0 success, 1 validation failure, 2 runtime error.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocal/ocal.hpp"

namespace {

std::vector<ocal::StrategyKind> strategies_from(const std::string& arg) {
  if (arg == "all") return ocal::all_strategies();
  std::vector<ocal::StrategyKind> out;
  std::string tok;
  std::istringstream is(arg);
  while (std::getline(is, tok, ',')) out.push_back(ocal::parse_strategy(tok));
  return out;
}

ocal::LoadResult load_any(const std::string& path, const std::string& format,
                          std::optional<double> target) {
  const bool svm =
      format == "svmlight" || (format.empty() && path.find(".svm") != std::string::npos);
  return svm ? ocal::load_svmlight_detailed(path, target)
             : ocal::load_csv_detailed(path, target);
}

void print_summary(const ocal::ExperimentSummary& summary) {
  std::cout << "strategy        gain (F1 percentage points, mean +/- std)\n";
  for (const auto& agg : summary.aggregates) {
    std::ostringstream row;
    row << ocal::strategy_name(agg.strategy);
    while (row.str().size() < 16) row << ' ';
    row << std::fixed << std::setprecision(2) << agg.mean_gain;
    if (agg.n_seeds >= 2) row << " +/- " << std::fixed << std::setprecision(2) << agg.std_gain;
    std::cout << row.str() << "  (" << agg.n_seeds << " seeds)\n";
  }
  std::cout << "summary: " << summary.summary_file << "\n"
            << "plot data: " << summary.curve_file << "\n";
}

int cmd_run(const std::string& config_path) {
  const ocal::ExperimentConfig cfg = ocal::parse_config_file(config_path);
  print_summary(ocal::run_experiment(cfg));
  return 0;
}

int cmd_bench(std::size_t seeds, int budget, const std::string& strategies,
              const std::string& out_dir) {
  const ocal::ExperimentConfig cfg =
      ocal::make_bench_config(seeds, budget, strategies_from(strategies), out_dir);
  print_summary(ocal::run_experiment(cfg));
  return 0;
}

int cmd_label(const std::string& dataset_path, const std::string& format,
              const std::string& strategy, int budget, const std::string& display,
              const std::string& margin_variant) {
  const ocal::LoadResult loaded = load_any(dataset_path, format, std::nullopt);
  const ocal::Dataset& data = loaded.dataset;

  ocal::PoolState pool;
  for (std::size_t i = 0; i < loaded.row_labels.size(); ++i) {
    const int id = static_cast<int>(i);
    switch (loaded.row_labels[i]) {
      case ocal::Label::Positive: pool.positives.push_back(id); break;
      case ocal::Label::Negative: pool.negatives.push_back(id); break;
      default: pool.unlabeled.push_back(id); break;
    }
  }
  if (pool.positives.empty())
    throw ocal::ValidationError("label: the dataset needs at least one row labeled 1");
  if (pool.unlabeled.empty())
    throw ocal::ValidationError("label: the dataset has no unlabeled (0) rows to query");

  int rows = 0, cols = 0;
  if (!display.empty()) {
    const std::size_t x = display.find('x');
    if (x == std::string::npos)
      throw ocal::ValidationError("label: --display expects ROWSxCOLS, e.g. 16x16");
    rows = std::stoi(display.substr(0, x));
    cols = std::stoi(display.substr(x + 1));
  }

  ocal::ExperimentConfig defaults;
  defaults.strategies = {ocal::parse_strategy(strategy)};
  defaults.seeds = {1};
  const ocal::TunedHyper tuned = ocal::tune_hyperparameters(data, pool, defaults, 1);

  ocal::LoopConfig lc;
  lc.budget = std::min<int>(budget, static_cast<int>(pool.unlabeled.size()));
  lc.strategy = defaults.strategies.front();
  lc.params.margin_variant =
      margin_variant == "exact" ? ocal::MarginVariant::Exact : ocal::MarginVariant::Paper;

  ocal::InteractiveOracle oracle(data, std::cin, std::cout, rows, cols);
  const ocal::LoopResult res = ocal::run_loop(data, pool, lc, oracle, tuned.hyper);

  std::size_t found_pos = 0, found_neg = 0;
  for (const auto& r : res.rounds)
    (r.oracle_answer == ocal::Label::Positive ? found_pos : found_neg)++;
  std::cout << (res.aborted ? "aborted after " : "finished ") << res.rounds.size()
            << " queries: " << found_pos << " positive, " << found_neg << " negative\n";
  return 0;
}

int cmd_info(const std::string& dataset_path, const std::string& format,
             std::optional<double> target) {
  const ocal::LoadResult loaded = load_any(dataset_path, format, target);
  const ocal::ValidationReport rep = ocal::validate_dataset(loaded.dataset);
  std::cout << rep.to_string();
  std::size_t unlabeled = 0;
  for (ocal::Label l : loaded.row_labels)
    if (l == ocal::Label::Unlabeled) ++unlabeled;
  if (unlabeled > 0) std::cout << "unlabeled rows: " << unlabeled << "\n";
  return rep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pool-based active learning for positive and unlabeled data"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("--config", config_path, "experiment config file")->required();

  std::size_t bench_seeds = 30;
  int bench_budget = 25;
  std::string bench_strategies = "all";
  std::string bench_out = "bench_out";
  bool synthetic = false;
  auto* bench = app.add_subcommand("bench", "run the built-in synthetic benchmark");
  bench->add_flag("--synthetic", synthetic, "use the built-in synthetic dataset")->required();
  bench->add_option("--seeds", bench_seeds, "number of seeds (1..N)");
  bench->add_option("--budget", bench_budget, "queries per run");
  bench->add_option("--strategies", bench_strategies, "comma list or 'all'");
  bench->add_option("--out", bench_out, "output directory");

  std::string label_dataset, label_strategy = "margin", label_display, label_format;
  std::string label_margin_variant = "paper";
  int label_budget = 25;
  auto* label = app.add_subcommand("label", "interactive labeling at the terminal");
  label->add_option("--dataset", label_dataset, "csv/svmlight file; rows labeled 1 seed P, 0 form the pool")
      ->required();
  label->add_option("--strategy", label_strategy, "query strategy");
  label->add_option("--budget", label_budget, "maximum number of queries");
  label->add_option("--display", label_display, "render features as ROWSxCOLS ascii intensity");
  label->add_option("--format", label_format, "csv or svmlight (default: by extension)");
  label->add_option("--margin-variant", label_margin_variant, "paper or exact");

  std::string info_dataset, info_format;
  double info_target = 0.0;
  auto* info = app.add_subcommand("info", "validate a dataset and print a report");
  info->add_option("--dataset", info_dataset, "csv/svmlight file")->required();
  info->add_option("--format", info_format, "csv or svmlight (default: by extension)");
  auto* target_opt = info->add_option("--target", info_target, "treat this class id as the target");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) return cmd_run(config_path);
    if (app.got_subcommand(bench))
      return cmd_bench(bench_seeds, bench_budget, bench_strategies, bench_out);
    if (app.got_subcommand(label))
      return cmd_label(label_dataset, label_format, label_strategy, label_budget, label_display,
                       label_margin_variant);
    if (app.got_subcommand(info))
      return cmd_info(info_dataset, info_format,
                      target_opt->count() ? std::optional<double>(info_target) : std::nullopt);
  } catch (const ocal::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
