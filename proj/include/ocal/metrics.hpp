// metrics.hpp - retrieval metrics and multi-seed aggregation.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ocal/data.hpp"
#include "ocal/strategies.hpp"

namespace ocal {

struct MetricsRecord {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Confusion counts with Positive as the target class. The 0/0 cases are
// defined as 0 so that comparisons stay total.
inline MetricsRecord compute_metrics(const std::vector<Label>& predictions,
                                     const std::vector<Label>& truth) {
  if (predictions.empty()) throw std::invalid_argument("compute_metrics: empty input");
  if (predictions.size() != truth.size())
    throw std::invalid_argument("compute_metrics: length mismatch");
  MetricsRecord r;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == Label::Unlabeled || truth[i] == Label::Unlabeled)
      throw std::invalid_argument("compute_metrics: labels must be positive or negative");
    const bool pred_pos = predictions[i] == Label::Positive;
    const bool true_pos = truth[i] == Label::Positive;
    if (pred_pos && true_pos) ++r.tp;
    if (pred_pos && !true_pos) ++r.fp;
    if (!pred_pos && true_pos) ++r.fn;
    if (!pred_pos && !true_pos) ++r.tn;
  }
  r.precision = (r.tp + r.fp) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  r.recall = (r.tp + r.fn) ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.f1 = (r.precision + r.recall > 0.0)
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

// F1 gain in percentage points: (final - baseline) * 100.
inline double f1_gain(double final_f1, double baseline_f1) {
  return (final_f1 - baseline_f1) * 100.0;
}

struct AggregateRecord {
  StrategyKind strategy = StrategyKind::Random;
  double mean_gain = 0.0;
  double std_gain = 0.0;
  std::size_t n_seeds = 0;
};

inline AggregateRecord aggregate_runs(const std::vector<double>& gains, StrategyKind strategy) {
  if (gains.size() < 2) throw std::invalid_argument("aggregate_runs: need at least 2 gains");
  AggregateRecord a;
  a.strategy = strategy;
  a.n_seeds = gains.size();
  double mean = 0.0;
  for (double g : gains) mean += g;
  mean /= static_cast<double>(gains.size());
  double ss = 0.0;
  for (double g : gains) ss += (g - mean) * (g - mean);
  a.mean_gain = mean;
  a.std_gain = std::sqrt(ss / static_cast<double>(gains.size() - 1));
  return a;
}

// One-sided sign test: probability of >= wins successes in trials fair coin
// flips. Ties must be dropped by the caller before counting.
inline double sign_test_one_sided(std::size_t wins, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("sign_test_one_sided: no trials");
  if (wins > trials) throw std::invalid_argument("sign_test_one_sided: wins exceed trials");
  double p = 0.0;
  for (std::size_t k = wins; k <= trials; ++k) {
    const double log_term = std::lgamma(static_cast<double>(trials) + 1.0) -
                            std::lgamma(static_cast<double>(k) + 1.0) -
                            std::lgamma(static_cast<double>(trials - k) + 1.0) -
                            static_cast<double>(trials) * std::log(2.0);
    p += std::exp(log_term);
  }
  return std::min(1.0, p);
}

}  // namespace ocal
