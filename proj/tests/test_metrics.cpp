// test_metrics.cpp - confusion metrics, gains, aggregation, sign test.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "ocal/metrics.hpp"
#include "ocal/rng.hpp"

using namespace ocal;
using Catch::Matchers::WithinAbs;

namespace {
const Label P = Label::Positive;
const Label N = Label::Negative;
}  // namespace

TEST_CASE("confusion counts and harmonic mean") {
  // tp=1, fp=1, fn=1, tn=1
  const MetricsRecord r = compute_metrics({P, P, N, N}, {P, N, P, N});
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.tn == 1);
  CHECK_THAT(r.precision, WithinAbs(0.5, 1e-15));
  CHECK_THAT(r.recall, WithinAbs(0.5, 1e-15));
  CHECK_THAT(r.f1, WithinAbs(0.5, 1e-15));
}

TEST_CASE("all-correct predictions score one") {
  const MetricsRecord r = compute_metrics({P, N, P}, {P, N, P});
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
}

TEST_CASE("no positive predictions fall back to zero by convention") {
  const MetricsRecord r = compute_metrics({N, N, N}, {P, P, N});
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f1 == 0.0);
}

TEST_CASE("metric invariants on random confusion tables") {
  SplitMix64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.next_below(40);
    std::vector<Label> pred, truth;
    for (std::size_t i = 0; i < n; ++i) {
      pred.push_back(rng.next_below(2) ? P : N);
      truth.push_back(rng.next_below(2) ? P : N);
    }
    const MetricsRecord r = compute_metrics(pred, truth);
    CHECK(r.tp + r.fp + r.fn + r.tn == n);
    if (r.precision == 0.0 || r.recall == 0.0) CHECK(r.f1 == 0.0);
    if (r.precision == r.recall) CHECK_THAT(r.f1, WithinAbs(r.precision, 1e-12));

    // permutation invariance under a joint shuffle
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(idx[i], idx[rng.next_below(i + 1)]);
    std::vector<Label> pred2, truth2;
    for (std::size_t i : idx) {
      pred2.push_back(pred[i]);
      truth2.push_back(truth[i]);
    }
    const MetricsRecord r2 = compute_metrics(pred2, truth2);
    CHECK(r2.tp == r.tp);
    CHECK(r2.f1 == r.f1);
  }
}

TEST_CASE("compute_metrics rejects bad input") {
  CHECK_THROWS_AS(compute_metrics({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics({P}, {P, N}), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics({Label::Unlabeled}, {P}), std::invalid_argument);
}

TEST_CASE("gain is reported in percentage points") {
  CHECK_THAT(f1_gain(0.54, 0.50), WithinAbs(4.0, 1e-12));
  CHECK_THAT(f1_gain(0.50, 0.50), WithinAbs(0.0, 1e-12));
  CHECK(f1_gain(0.45, 0.50) < 0.0);  // active learning can hurt
}

TEST_CASE("aggregation over seeds") {
  const AggregateRecord a = aggregate_runs({2.0, 4.0}, StrategyKind::ExpectedMargin);
  CHECK_THAT(a.mean_gain, WithinAbs(3.0, 1e-15));
  CHECK_THAT(a.std_gain, WithinAbs(std::sqrt(2.0), 1e-12));
  CHECK(a.n_seeds == 2);
  CHECK(a.strategy == StrategyKind::ExpectedMargin);

  const AggregateRecord b = aggregate_runs({1.5, 1.5, 1.5}, StrategyKind::Random);
  CHECK(b.std_gain == 0.0);

  CHECK_THROWS_AS(aggregate_runs({1.0}, StrategyKind::Random), std::invalid_argument);
}

TEST_CASE("one-sided sign test tail probabilities") {
  // 30 wins out of 30: 2^-30
  CHECK_THAT(sign_test_one_sided(30, 30), WithinAbs(std::pow(0.5, 30), 1e-15));
  // half the wins: p well above any rejection threshold
  CHECK(sign_test_one_sided(15, 30) > 0.5);
  // full mass
  CHECK_THAT(sign_test_one_sided(0, 12), WithinAbs(1.0, 1e-12));
  // 22 of 30 is significant at 5%
  CHECK(sign_test_one_sided(22, 30) < 0.05);
  CHECK(sign_test_one_sided(19, 30) > 0.05);
  CHECK_THROWS_AS(sign_test_one_sided(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(sign_test_one_sided(5, 4), std::invalid_argument);
}
