// test_strategies.cpp - closed-form scores against quadrature, graph
// construction, and the selection rules.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "ocal/strategies.hpp"
#include "support/quadrature.hpp"

using namespace ocal;
using Catch::Matchers::WithinAbs;

TEST_CASE("published margin form at reference points") {
  CHECK_THAT(expected_margin_score(0.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(expected_margin_score(0.25), WithinAbs(0.75, 1e-15));
  CHECK_THAT(expected_margin_score(1.0), WithinAbs(0.0, 1e-15));  // literal formula
  CHECK_THAT(expected_margin_score(0.5), WithinAbs(0.0, 1e-15));  // sgn(0) = 0
}

TEST_CASE("published margin form matches quadrature below one half") {
  // open at 1/2: the sgn(0) = 0 convention makes the formula 0 there while
  // the integral is 1/2, so agreement holds on [0, 1/2) only
  for (int i = 0; i < 100; ++i) {
    const double a = 0.5 * static_cast<double>(i) / 100.0;
    CHECK_THAT(expected_margin_score(a), WithinAbs(testsupport::margin_by_quadrature(a), 1e-10));
  }
  const double just_below = std::nextafter(0.5, 0.0);
  CHECK_THAT(expected_margin_score(just_below),
             WithinAbs(testsupport::margin_by_quadrature(just_below), 1e-10));
}

TEST_CASE("exact margin integral matches quadrature everywhere") {
  CHECK_THAT(exact_expected_margin(0.25), WithinAbs(0.75, 1e-15));
  CHECK_THAT(exact_expected_margin(1.0), WithinAbs(0.5, 1e-15));
  CHECK_THAT(exact_expected_margin(1.0 / std::sqrt(2.0)),
             WithinAbs(std::sqrt(2.0) - 1.0, 1e-12));
  for (int i = 1; i <= 200; ++i) {
    const double a = 4.0 * static_cast<double>(i) / 200.0;
    CHECK_THAT(exact_expected_margin(a), WithinAbs(testsupport::margin_by_quadrature(a), 1e-10));
    CHECK(exact_expected_margin(a) >= 0.0);
  }
  // continuity at the branch point
  CHECK_THAT(exact_expected_margin(std::nextafter(0.5, 1.0)),
             WithinAbs(exact_expected_margin(0.5), 1e-12));
}

TEST_CASE("published-minus-exact discrepancy is exactly -1/(2a) past one half") {
  for (int i = 0; i < 500; ++i) {
    const double a = 0.5 + 3.5 * (static_cast<double>(i) + 0.5) / 500.0;
    CHECK_THAT(expected_margin_score(a) - exact_expected_margin(a),
               WithinAbs(-1.0 / (2.0 * a), 1e-10));
  }
}

TEST_CASE("entropy score endpoints and reference values") {
  CHECK(expected_entropy_score(0.0) == 0.0);
  CHECK_THAT(expected_entropy_score(1.0), WithinAbs(0.5, 1e-15));
  CHECK_THAT(expected_entropy_score(0.2), WithinAbs(0.30391, 1e-5));
  CHECK_THAT(expected_entropy_score(0.8), WithinAbs(0.54902, 1e-5));
  // ratios beyond 1 clamp to the a = 1 limit and never beat the interior max
  CHECK_THAT(expected_entropy_score(3.7), WithinAbs(0.5, 1e-15));
  CHECK(expected_entropy_score(0.75) > 0.5);
}

TEST_CASE("entropy closed form matches quadrature") {
  for (int i = 0; i < 200; ++i) {
    const double a = 1e-6 + (1.0 - 2e-6) * static_cast<double>(i) / 199.0;
    CHECK_THAT(expected_entropy_score(a), WithinAbs(testsupport::entropy_by_quadrature(a), 1e-8));
  }
}

TEST_CASE("entropy score is positive on the open interval") {
  for (int i = 1; i < 100; ++i) {
    const double a = static_cast<double>(i) / 100.0;
    CHECK(expected_entropy_score(a) > 0.0);
  }
}

namespace {

std::vector<Sample> line_samples(const std::vector<double>& xs) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({static_cast<int>(i), {xs[i]}});
  return out;
}

}  // namespace

TEST_CASE("knn graph on three collinear points") {
  const KnnGraph g = build_knn_graph(line_samples({0.0, 1.0, 2.5}), 1);
  // brute force: 0's nearest is 1, 1's nearest is 0, 2's nearest is 1
  CHECK(*g.neighbors(0) == std::vector<int>{1});
  CHECK(*g.neighbors(1) == std::vector<int>{0, 2});
  CHECK(*g.neighbors(2) == std::vector<int>{1});
}

TEST_CASE("knn graph with k = n-1 is complete") {
  const KnnGraph g = build_knn_graph(line_samples({0.0, 1.0, 5.0, 9.0}), 3);
  for (int i = 0; i < 4; ++i) CHECK(g.neighbors(i)->size() == 3);
}

TEST_CASE("knn graph duplicate points break ties toward lower ids") {
  const KnnGraph g = build_knn_graph(line_samples({0.0, 0.0, 1.0}), 1);
  CHECK(*g.neighbors(0) == std::vector<int>{1, 2});
  CHECK(*g.neighbors(1) == std::vector<int>{0});
  CHECK(*g.neighbors(2) == std::vector<int>{0});
  // symmetric, no self edges
  for (const auto& [id, nbrs] : g.adjacency)
    for (int j : nbrs) {
      CHECK(j != id);
      const auto& back = *g.neighbors(j);
      CHECK(std::find(back.begin(), back.end(), id) != back.end());
    }
}

TEST_CASE("knn graph rejects k out of range") {
  CHECK_THROWS_AS(build_knn_graph(line_samples({0.0, 1.0}), 2), std::invalid_argument);
  CHECK_THROWS_AS(build_knn_graph(line_samples({0.0, 1.0}), 0), std::invalid_argument);
}

namespace {

struct SelectionFixture {
  std::vector<Sample> samples;
  PoolState pool;
  KdeModel pos_density{{{0.0}}, 1.0, 1};
  KdeModel all_density{{{0.0}}, 1.0, 1};
  SvddModel svdd;
  KnnGraph knn;

  QueryContext ctx() const {
    QueryContext c;
    c.samples = &samples;
    c.pool = &pool;
    c.pos_density = &pos_density;
    c.all_density = &all_density;
    c.svdd = &svdd;
    c.knn = &knn;
    return c;
  }
};

SelectionFixture make_fixture() {
  SelectionFixture f;
  // pool points spread over [0, 4]; positives cluster near 0
  const std::vector<double> xs{0.2, 1.0, 1.8, 2.6, 3.4, 0.0, -0.2, 0.1};
  f.samples = line_samples(xs);
  f.pool.unlabeled = {0, 1, 2, 3, 4};
  f.pool.positives = {5, 6, 7};
  f.pos_density = fit_kde({{0.0}, {-0.2}, {0.1}}, 0.5);
  f.all_density = fit_kde({{0.2}, {1.0}, {1.8}, {2.6}, {3.4}, {0.0}, {-0.2}, {0.1}}, 0.5);
  f.svdd = train_svdd({{0.0}, {-0.2}, {0.1}}, {}, KernelSpec{KernelKind::RBF, 1.0}, 1.0, 1.0);
  f.knn = build_knn_graph(f.samples, 2);
  return f;
}

}  // namespace

TEST_CASE("relevance picks the highest svdd score, lowest id on ties") {
  SelectionFixture f = make_fixture();
  QueryContext ctx = f.ctx();

  // brute-force reference
  int best = -1;
  double best_score = -1e300;
  for (int id : f.pool.unlabeled) {
    const double s = svdd_score(f.svdd, f.samples[static_cast<std::size_t>(id)].x);
    if (s > best_score) {
      best_score = s;
      best = id;
    }
  }
  CHECK(relevance_select(ctx) == best);

  // singleton pool
  f.pool.unlabeled = {3};
  CHECK(relevance_select(ctx) == 3);

  // exact tie: duplicate feature vectors at ids 2 and 3
  f.samples[3].x = f.samples[2].x;
  f.pool.unlabeled = {3, 2};
  CHECK(relevance_select(ctx) == 2);
}

TEST_CASE("margin selection picks the ratio nearest one half from above") {
  SelectionFixture f = make_fixture();
  QueryContext ctx = f.ctx();

  // reference: evaluate the published formula over the pool's ratios
  int best = -1;
  double best_score = 1e300;
  for (int id : f.pool.unlabeled) {
    const double a =
        likelihood_ratio(f.pos_density, f.all_density, f.samples[static_cast<std::size_t>(id)].x);
    const double s = expected_margin_score(a);
    if (s < best_score) {
      best_score = s;
      best = id;
    }
  }
  CHECK(select_query(StrategyKind::ExpectedMargin, ctx) == best);
}

TEST_CASE("margin formula ranks the spec's three reference ratios") {
  const double s1 = expected_margin_score(0.1);
  const double s2 = expected_margin_score(0.55);
  const double s3 = expected_margin_score(0.9);
  CHECK_THAT(s1, WithinAbs(0.9, 1e-12));
  CHECK_THAT(s2, WithinAbs(-0.45, 1e-12));
  CHECK_THAT(s3, WithinAbs(-0.1, 1e-12));
  CHECK(s2 < s3);
  CHECK(s3 < s1);
}

TEST_CASE("entropy selection agrees with direct evaluation") {
  SelectionFixture f = make_fixture();
  QueryContext ctx = f.ctx();
  int best = -1;
  double best_score = -1e300;
  for (int id : f.pool.unlabeled) {
    const double a =
        likelihood_ratio(f.pos_density, f.all_density, f.samples[static_cast<std::size_t>(id)].x);
    const double s = expected_entropy_score(a);
    if (s > best_score) {
      best_score = s;
      best = id;
    }
  }
  CHECK(select_query(StrategyKind::ExpectedEntropy, ctx) == best);
  CHECK(expected_entropy_score(0.2) < expected_entropy_score(0.8));
}

TEST_CASE("selection depends only on the density ratio, not its scale") {
  SelectionFixture f = make_fixture();
  QueryContext ctx = f.ctx();
  const int chosen_margin = select_query(StrategyKind::ExpectedMargin, ctx);
  const int chosen_entropy = select_query(StrategyKind::ExpectedEntropy, ctx);

  for (double scale : {1e-9, 1.0, 1e9}) {
    int best_m = -1, best_e = -1;
    double sm = 1e300, se = -1e300;
    for (int id : f.pool.unlabeled) {
      const auto& x = f.samples[static_cast<std::size_t>(id)].x;
      const double a = (scale * kde_evaluate(f.pos_density, x)) /
                       (scale * kde_evaluate(f.all_density, x));
      if (expected_margin_score(a) < sm) {
        sm = expected_margin_score(a);
        best_m = id;
      }
      if (expected_entropy_score(a) > se) {
        se = expected_entropy_score(a);
        best_e = id;
      }
    }
    CHECK(best_m == chosen_margin);
    CHECK(best_e == chosen_entropy);
  }
}

TEST_CASE("exact margin variant selects the ratio nearest 1/sqrt(2)") {
  SelectionFixture f = make_fixture();
  QueryContext ctx = f.ctx();
  ctx.params.margin_variant = MarginVariant::Exact;
  int best = -1;
  double best_score = 1e300;
  for (int id : f.pool.unlabeled) {
    const double a =
        likelihood_ratio(f.pos_density, f.all_density, f.samples[static_cast<std::size_t>(id)].x);
    if (exact_expected_margin(a) < best_score) {
      best_score = exact_expected_margin(a);
      best = id;
    }
  }
  CHECK(select_query(StrategyKind::ExpectedMargin, ctx) == best);
}

TEST_CASE("neighborhood rule with sigma = 1 is pure boundary uncertainty") {
  SelectionFixture f = make_fixture();
  QueryContext ctx = f.ctx();
  ctx.params.sigma = 1.0;
  int best = -1;
  double best_score = 1e300;
  for (int id : f.pool.unlabeled) {
    const double d = kernel_distance_to_center(f.svdd, f.samples[static_cast<std::size_t>(id)].x);
    const double s = std::abs(d - f.svdd.radius);
    if (s < best_score) {
      best_score = s;
      best = id;
    }
  }
  CHECK(neighborhood_select(ctx) == best);
}

TEST_CASE("neighborhood rule with sigma = 0 counts unlabeled neighbors") {
  // chain 0-1-2-3 in the pool, positives 4 and 5 adjacent only to each other
  SelectionFixture f;
  f.samples = line_samples({0.0, 1.0, 1.9, 10.0, 1000.0, 1001.0});
  f.pool.unlabeled = {0, 1, 2, 3};
  f.pool.positives = {4, 5};
  f.pos_density = fit_kde({{1000.0}, {1001.0}}, 1.0);
  f.all_density = fit_kde({{0.0}, {1.0}, {1.9}, {10.0}, {1000.0}, {1001.0}}, 1.0);
  f.svdd = train_svdd({{1000.0}, {1001.0}}, {}, KernelSpec{KernelKind::RBF, 0.1}, 1.0, 1.0);
  f.knn = build_knn_graph(f.samples, 1);
  REQUIRE(*f.knn.neighbors(4) == std::vector<int>{5});

  QueryContext ctx = f.ctx();
  ctx.params.sigma = 0.0;
  ctx.params.k = 1;

  // brute-force the formula: ends of the chain have one unlabeled neighbor,
  // middles have two; tie between ids 0 and 3 goes to 0
  int best = -1;
  double best_score = 1e300;
  for (int id : f.pool.unlabeled) {
    double sum = 0.0;
    for (int j : *f.knn.neighbors(id)) {
      if (std::find(f.pool.unlabeled.begin(), f.pool.unlabeled.end(), j) != f.pool.unlabeled.end())
        sum += 1.0;
      else if (std::find(f.pool.positives.begin(), f.pool.positives.end(), j) != f.pool.positives.end())
        sum += 2.0;
    }
    const double s = sum / 2.0;
    if (s < best_score || (s == best_score && id < best)) {
      best_score = s;
      best = id;
    }
  }
  CHECK(best == 0);
  CHECK(neighborhood_select(ctx) == 0);
}

TEST_CASE("neighborhood rule returns a singleton pool unchanged") {
  SelectionFixture f = make_fixture();
  f.pool.unlabeled = {4};
  QueryContext ctx = f.ctx();
  CHECK(neighborhood_select(ctx) == 4);
}

TEST_CASE("random strategy is deterministic per seed and round") {
  SelectionFixture f = make_fixture();
  QueryContext ctx = f.ctx();
  ctx.params.random_seed = 99;
  ctx.round = 3;
  const int first = select_query(StrategyKind::Random, ctx);
  CHECK(select_query(StrategyKind::Random, ctx) == first);
  CHECK(std::find(f.pool.unlabeled.begin(), f.pool.unlabeled.end(), first) !=
        f.pool.unlabeled.end());
}

TEST_CASE("every selector returns a pool element and repeats deterministically") {
  SelectionFixture f = make_fixture();
  const std::set<int> pool(f.pool.unlabeled.begin(), f.pool.unlabeled.end());
  for (StrategyKind kind :
       {StrategyKind::Random, StrategyKind::MaxRelevance, StrategyKind::NeighborhoodSvdd,
        StrategyKind::ExpectedMargin, StrategyKind::ExpectedEntropy}) {
    QueryContext ctx = f.ctx();
    ctx.params.random_seed = 5;
    const int a = select_query(kind, ctx);
    const int b = select_query(kind, ctx);
    CHECK(a == b);
    CHECK(pool.count(a) == 1);
  }
}

TEST_CASE("select_query rejects an empty pool and missing context") {
  SelectionFixture f = make_fixture();
  f.pool.unlabeled.clear();
  QueryContext ctx = f.ctx();
  CHECK_THROWS_AS(select_query(StrategyKind::Random, ctx), std::invalid_argument);

  SelectionFixture g = make_fixture();
  QueryContext bare = g.ctx();
  bare.knn = nullptr;
  CHECK_THROWS_AS(select_query(StrategyKind::NeighborhoodSvdd, bare), std::invalid_argument);
  bare.pos_density = nullptr;
  CHECK_THROWS_AS(select_query(StrategyKind::ExpectedMargin, bare), std::invalid_argument);
}
