// loop.hpp - the outer active-learning loop.
//
// Each round: refit densities, train the one-class model on L = P + N, pick
// one pool sample by the configured strategy, ask the oracle, move the sample
// into P or N, retrain, evaluate on the held-out test ids. Runs for a fixed
// query budget; an interactive oracle may abort early.

#pragma once

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ocal/data.hpp"
#include "ocal/density.hpp"
#include "ocal/metrics.hpp"
#include "ocal/strategies.hpp"
#include "ocal/svdd.hpp"

namespace ocal {

struct Oracle {
  virtual ~Oracle() = default;
  // nullopt means the oracle gave up (interactive abort); the loop stops.
  virtual std::optional<Label> query(int id) = 0;
};

class GroundTruthOracle : public Oracle {
 public:
  explicit GroundTruthOracle(const Dataset& data) : data_(&data) {
    if (!data.truth) throw ValidationError("GroundTruthOracle: dataset has no truth labels");
  }
  std::optional<Label> query(int id) override {
    return (*data_->truth)[static_cast<std::size_t>(id)];
  }

 private:
  const Dataset* data_;
};

// Asks a human at the terminal. Shows the sample's features, or an ASCII
// intensity rendering when a rows x cols display hint matching the feature
// dimension is set (digit data reads surprisingly well this way).
class InteractiveOracle : public Oracle {
 public:
  InteractiveOracle(const Dataset& data, std::istream& in = std::cin, std::ostream& out = std::cout,
                    int display_rows = 0, int display_cols = 0)
      : data_(&data), in_(&in), out_(&out), rows_(display_rows), cols_(display_cols) {}

  std::optional<Label> query(int id) override {
    render((*data_).samples[static_cast<std::size_t>(id)]);
    while (true) {
      *out_ << "label sample " << id << " as target? [y/n/q] " << std::flush;
      std::string line;
      if (!std::getline(*in_, line)) return std::nullopt;  // closed input aborts
      if (line == "y" || line == "Y") return Label::Positive;
      if (line == "n" || line == "N") return Label::Negative;
      if (line == "q" || line == "Q") return std::nullopt;
      *out_ << "please answer y, n or q\n";
    }
  }

 private:
  void render(const Sample& s) const {
    const int d = static_cast<int>(s.x.size());
    if (rows_ > 0 && cols_ > 0 && rows_ * cols_ == d) {
      static const char ramp[] = " .:-=+*#%@";
      double lo = s.x[0], hi = s.x[0];
      for (double v : s.x) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double span = (hi > lo) ? hi - lo : 1.0;
      for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
          const double t = (s.x[static_cast<std::size_t>(r * cols_ + c)] - lo) / span;
          *out_ << ramp[static_cast<int>(t * 9.0 + 0.5)];
        }
        *out_ << '\n';
      }
      return;
    }
    *out_ << "features:";
    const int shown = std::min(d, 16);
    for (int i = 0; i < shown; ++i) *out_ << ' ' << s.x[static_cast<std::size_t>(i)];
    if (shown < d) *out_ << " ... (" << d << " total)";
    *out_ << '\n';
  }

  const Dataset* data_;
  std::istream* in_;
  std::ostream* out_;
  int rows_, cols_;
};

struct LoopConfig {
  int budget = 25;
  StrategyKind strategy = StrategyKind::ExpectedMargin;
  StrategyParams params;
  bool retrain_each_round = true;
  // p(x) is fit on pool + labeled data, which no query can change, so
  // refitting it is redundant; the switch exists for fidelity experiments.
  bool density_refit_each_round = false;
};

struct ModelHyper {
  double h_pos = 1.0;  // bandwidth of the p(x|+) model
  double h_all = 1.0;  // bandwidth of the p(x) model
  KernelSpec kernel;
  double c_pos = 1.0;
  double c_neg = 1.0;
  double tol = 1e-6;
};

struct RoundRecord {
  int round = 0;
  int selected_id = -1;
  Label oracle_answer = Label::Unlabeled;
  MetricsRecord metrics;  // on the test split, after retraining
};

struct LoopResult {
  std::vector<RoundRecord> rounds;
  MetricsRecord baseline;  // round-0 model, before any query
  PoolState final_pool;
  bool aborted = false;
};

// Test hook reporting which sample ids each round's models were fit on.
struct LoopObserver {
  std::function<void(int round, const std::vector<int>& pos_fit_ids,
                     const std::vector<int>& all_fit_ids, const std::vector<int>& train_ids)>
      on_round_models;
};

namespace detail {

inline std::vector<std::vector<double>> features_of(const Dataset& d, const std::vector<int>& ids) {
  std::vector<std::vector<double>> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(d.samples[static_cast<std::size_t>(id)].x);
  return out;
}

inline MetricsRecord evaluate_on_test(const Dataset& d, const SvddModel& m,
                                      const std::vector<int>& test_ids) {
  if (test_ids.empty()) return MetricsRecord{};  // nothing to evaluate against
  if (!d.truth) throw ValidationError("run_loop: test split present but dataset has no truth");
  std::vector<Label> pred, truth;
  pred.reserve(test_ids.size());
  truth.reserve(test_ids.size());
  for (int id : test_ids) {
    pred.push_back(svdd_predict(m, d.samples[static_cast<std::size_t>(id)].x));
    truth.push_back((*d.truth)[static_cast<std::size_t>(id)]);
  }
  return compute_metrics(pred, truth);
}

}  // namespace detail

inline LoopResult run_loop(const Dataset& dataset, const PoolState& start, const LoopConfig& cfg,
                           Oracle& oracle, const ModelHyper& hyper,
                           const LoopObserver* observer = nullptr) {
  if (cfg.budget < 1) throw std::invalid_argument("run_loop: budget must be at least 1");
  if (static_cast<std::size_t>(cfg.budget) > start.unlabeled.size())
    throw std::invalid_argument("run_loop: budget exceeds the unlabeled pool");
  if (start.positives.empty()) throw std::invalid_argument("run_loop: no labeled positives");

  PoolState pool = start;
  LoopResult result;

  // p(x) sees pool + labeled features only, never the test split. The id set
  // is invariant under oracle answers, so one fit normally suffices.
  std::vector<int> all_ids = pool.unlabeled;
  all_ids.insert(all_ids.end(), pool.positives.begin(), pool.positives.end());
  all_ids.insert(all_ids.end(), pool.negatives.begin(), pool.negatives.end());
  KdeModel all_density = fit_kde(detail::features_of(dataset, all_ids), hyper.h_all);

  SvddModel model = train_svdd(detail::features_of(dataset, pool.positives),
                               detail::features_of(dataset, pool.negatives), hyper.kernel,
                               hyper.c_pos, hyper.c_neg, hyper.tol);
  result.baseline = detail::evaluate_on_test(dataset, model, pool.test);

  KnnGraph graph;
  if (cfg.strategy == StrategyKind::NeighborhoodSvdd) {
    std::vector<Sample> graph_samples;
    for (int id : all_ids) graph_samples.push_back(dataset.samples[static_cast<std::size_t>(id)]);
    graph = build_knn_graph(graph_samples, cfg.params.k);
  }

  for (int round = 1; round <= cfg.budget; ++round) {
    KdeModel pos_density = fit_kde(detail::features_of(dataset, pool.positives), hyper.h_pos);
    if (cfg.density_refit_each_round && round > 1)
      all_density = fit_kde(detail::features_of(dataset, all_ids), hyper.h_all);
    if (observer && observer->on_round_models)
      observer->on_round_models(round, pool.positives, all_ids, pool.labeled());

    QueryContext ctx;
    ctx.samples = &dataset.samples;
    ctx.pool = &pool;
    ctx.pos_density = &pos_density;
    ctx.all_density = &all_density;
    ctx.svdd = &model;
    ctx.knn = (cfg.strategy == StrategyKind::NeighborhoodSvdd) ? &graph : nullptr;
    ctx.params = cfg.params;
    ctx.round = round;

    const int selected = select_query(cfg.strategy, ctx);
    const std::optional<Label> answer = oracle.query(selected);
    if (!answer) {
      result.aborted = true;
      break;
    }
    pool = apply_oracle_answer(pool, selected, *answer);

    if (cfg.retrain_each_round)
      model = train_svdd(detail::features_of(dataset, pool.positives),
                         detail::features_of(dataset, pool.negatives), hyper.kernel, hyper.c_pos,
                         hyper.c_neg, hyper.tol);

    RoundRecord rec;
    rec.round = round;
    rec.selected_id = selected;
    rec.oracle_answer = *answer;
    rec.metrics = detail::evaluate_on_test(dataset, model, pool.test);
    result.rounds.push_back(rec);
  }
  result.final_pool = pool;
  return result;
}

// F1 gain of a finished trace over the round-0 baseline, in percentage
// points (the scale used when comparing strategies).
inline double gain(const std::vector<RoundRecord>& trace, const MetricsRecord& baseline) {
  if (trace.empty()) throw std::invalid_argument("gain: empty trace");
  return f1_gain(trace.back().metrics.f1, baseline.f1);
}

}  // namespace ocal
