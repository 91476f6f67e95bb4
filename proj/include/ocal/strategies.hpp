// strategies.hpp - query selection rules.
//
// Five ways to pick the next pool sample to label. The two prior-averaged
// rules score a sample through the likelihood ratio a = p(x|+)/p(x) alone,
// treating the unknown positive-class prior as uniform on [0,1] and
// integrating it out:
//
//   margin   integral_0^1 |1 - 2aP| dP,  published closed form
//            (1-a) sgn(1/2-a), argmin
//   entropy  integral_0^1 -[aP log aP + (1-aP) log(1-aP)] dP
//            = [-a^2 log a + a + (a-1)^2 log(1-a)] / (2a), argmax
//
// The published margin closed form is wrong for a > 1/2 (an expectation of
// an absolute value cannot be negative); the correct antiderivative gives
// a - 1 + 1/(2a) there. Both variants are available: Paper is the default,
// Exact sits behind MarginVariant::Exact, and tests assert the exact
// discrepancy paper(a) - exact(a) = -1/(2a) rather than patching it quietly.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocal/data.hpp"
#include "ocal/density.hpp"
#include "ocal/rng.hpp"
#include "ocal/svdd.hpp"

namespace ocal {

enum class StrategyKind { Random, MaxRelevance, NeighborhoodSvdd, ExpectedMargin, ExpectedEntropy };

enum class MarginVariant { Paper, Exact };

inline const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Random: return "random";
    case StrategyKind::MaxRelevance: return "relevance";
    case StrategyKind::NeighborhoodSvdd: return "neighborhood";
    case StrategyKind::ExpectedMargin: return "margin";
    default: return "entropy";
  }
}

inline StrategyKind parse_strategy(const std::string& name) {
  if (name == "random") return StrategyKind::Random;
  if (name == "relevance") return StrategyKind::MaxRelevance;
  if (name == "neighborhood") return StrategyKind::NeighborhoodSvdd;
  if (name == "margin") return StrategyKind::ExpectedMargin;
  if (name == "entropy") return StrategyKind::ExpectedEntropy;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (expected random, relevance, neighborhood, margin or entropy)");
}

struct StrategyParams {
  double sigma = 0.5;     // neighborhood rule: weight of the boundary term
  double c = 1.0;         // neighborhood rule: distance scale
  int k = 5;              // neighborhood rule: graph degree
  MarginVariant margin_variant = MarginVariant::Paper;
  std::uint64_t random_seed = 0;
};

// Published expected-margin form, lower is more uncertain. sgn(0) is 0 by
// convention, which only affects ratios exactly at 1/2.
inline double expected_margin_score(double a) {
  const double s = (a < 0.5) ? 1.0 : (a > 0.5 ? -1.0 : 0.0);
  return (1.0 - a) * s;
}

// True value of the prior-averaged margin integral; always >= 0, continuous
// at a = 1/2, global minimum sqrt(2)-1 at a = 1/sqrt(2).
inline double exact_expected_margin(double a) {
  if (a <= 0.5) return 1.0 - a;
  return a - 1.0 + 1.0 / (2.0 * a);
}

// Prior-averaged posterior entropy, higher is more uncertain. The entropy
// integrand needs a*P in [0,1], so the ratio is clamped to 1 first; clamped
// points all score the a=1 limit 1/2, below the interior maximum.
inline double expected_entropy_score(double a) {
  a = std::clamp(a, 0.0, 1.0);
  if (a == 0.0) return 0.0;
  if (a == 1.0) return 0.5;
  return (-a * a * std::log(a) + a + (a - 1.0) * (a - 1.0) * std::log(1.0 - a)) / (2.0 * a);
}

// Symmetrized k-nearest-neighbor graph, edge i-j iff j is among i's k nearest
// Euclidean neighbors or vice versa. Distance ties break toward the lower id.
struct KnnGraph {
  int k = 0;
  std::map<int, std::vector<int>> adjacency;

  const std::vector<int>* neighbors(int id) const {
    const auto it = adjacency.find(id);
    return it == adjacency.end() ? nullptr : &it->second;
  }
};

inline KnnGraph build_knn_graph(const std::vector<Sample>& samples, int k) {
  const int n = static_cast<int>(samples.size());
  if (k < 1) throw std::invalid_argument("build_knn_graph: k must be positive");
  if (k >= n) throw std::invalid_argument("build_knn_graph: k must be smaller than the sample count");

  KnnGraph g;
  g.k = k;
  for (const Sample& s : samples) g.adjacency[s.id] = {};
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> order;
    order.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double r2 = 0.0;
      for (std::size_t t = 0; t < samples[static_cast<std::size_t>(i)].x.size(); ++t) {
        const double d =
            samples[static_cast<std::size_t>(i)].x[t] - samples[static_cast<std::size_t>(j)].x[t];
        r2 += d * d;
      }
      order.emplace_back(r2, samples[static_cast<std::size_t>(j)].id);
    }
    std::sort(order.begin(), order.end());
    const int self = samples[static_cast<std::size_t>(i)].id;
    for (int t = 0; t < k; ++t) {
      const int other = order[static_cast<std::size_t>(t)].second;
      g.adjacency[self].push_back(other);
      g.adjacency[other].push_back(self);
    }
  }
  for (auto& [id, nbrs] : g.adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return g;
}

// Everything a strategy may look at when ranking the pool. Ground-truth
// labels are deliberately absent.
struct QueryContext {
  const std::vector<Sample>* samples = nullptr;  // indexed by id
  const PoolState* pool = nullptr;
  const KdeModel* pos_density = nullptr;
  const KdeModel* all_density = nullptr;
  const SvddModel* svdd = nullptr;
  const KnnGraph* knn = nullptr;
  StrategyParams params;
  int round = 1;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("select_query: context not prepared: ") + what);
}

// argmin over U with ties broken toward the lowest id
template <typename Score>
int argmin_pool(const std::vector<int>& pool, Score&& score) {
  if (pool.empty()) throw std::invalid_argument("select_query: unlabeled pool is empty");
  int best_id = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int id : pool) {
    const double s = score(id);
    if (best_id < 0 || s < best || (s == best && id < best_id)) {
      best = s;
      best_id = id;
    }
  }
  return best_id;
}

}  // namespace detail

// Most relevant sample: argmax of the SVDD score over the pool.
inline int relevance_select(const QueryContext& ctx) {
  detail::require(ctx.pool && ctx.samples && ctx.svdd, "needs pool, samples and a trained model");
  return detail::argmin_pool(ctx.pool->unlabeled, [&](int id) {
    return -svdd_score(*ctx.svdd, (*ctx.samples)[static_cast<std::size_t>(id)].x);
  });
}

// Boundary-uncertainty plus neighborhood-exploration rule:
//   argmin sigma |d(x,center)-R| / c + (1-sigma)/(2k) sum_j (ybar_j + 1) a_ij
// where ybar is +1 for labeled positives, -1 for labeled negatives and 0 for
// pool samples, and the sum runs over graph neighbors inside L and U.
inline int neighborhood_select(const QueryContext& ctx) {
  detail::require(ctx.pool && ctx.samples && ctx.svdd, "needs pool, samples and a trained model");
  detail::require(ctx.knn != nullptr, "neighborhood rule needs a knn graph");
  const StrategyParams& p = ctx.params;
  if (!(p.c > 0.0)) throw std::invalid_argument("neighborhood_select: scale c must be positive");

  std::map<int, double> ybar_plus_1;
  for (int id : ctx.pool->positives) ybar_plus_1[id] = 2.0;
  for (int id : ctx.pool->negatives) ybar_plus_1[id] = 0.0;
  for (int id : ctx.pool->unlabeled) ybar_plus_1[id] = 1.0;

  return detail::argmin_pool(ctx.pool->unlabeled, [&](int id) {
    const double d = kernel_distance_to_center(*ctx.svdd, (*ctx.samples)[static_cast<std::size_t>(id)].x);
    double explore = 0.0;
    if (const std::vector<int>* nbrs = ctx.knn->neighbors(id)) {
      for (int j : *nbrs) {
        const auto it = ybar_plus_1.find(j);  // ids outside L+U contribute nothing
        if (it != ybar_plus_1.end()) explore += it->second;
      }
    }
    return p.sigma * std::abs(d - ctx.svdd->radius) / p.c +
           (1.0 - p.sigma) / (2.0 * static_cast<double>(p.k)) * explore;
  });
}

inline int select_query(StrategyKind kind, const QueryContext& ctx) {
  detail::require(ctx.pool != nullptr, "needs a pool");
  const std::vector<int>& u = ctx.pool->unlabeled;
  if (u.empty()) throw std::invalid_argument("select_query: unlabeled pool is empty");

  switch (kind) {
    case StrategyKind::Random: {
      SplitMix64 rng(mix_seed(ctx.params.random_seed, static_cast<std::uint64_t>(ctx.round)));
      return u[static_cast<std::size_t>(rng.next_below(u.size()))];
    }
    case StrategyKind::MaxRelevance:
      return relevance_select(ctx);
    case StrategyKind::NeighborhoodSvdd:
      return neighborhood_select(ctx);
    case StrategyKind::ExpectedMargin: {
      detail::require(ctx.samples && ctx.pos_density && ctx.all_density,
                      "margin rule needs both density models");
      const bool exact = ctx.params.margin_variant == MarginVariant::Exact;
      return detail::argmin_pool(u, [&](int id) {
        const double a = likelihood_ratio(*ctx.pos_density, *ctx.all_density,
                                          (*ctx.samples)[static_cast<std::size_t>(id)].x);
        return exact ? exact_expected_margin(a) : expected_margin_score(a);
      });
    }
    case StrategyKind::ExpectedEntropy: {
      detail::require(ctx.samples && ctx.pos_density && ctx.all_density,
                      "entropy rule needs both density models");
      return detail::argmin_pool(u, [&](int id) {
        const double a = likelihood_ratio(*ctx.pos_density, *ctx.all_density,
                                          (*ctx.samples)[static_cast<std::size_t>(id)].x);
        return -expected_entropy_score(a);
      });
    }
  }
  throw std::invalid_argument("select_query: unknown strategy");
}

}  // namespace ocal
