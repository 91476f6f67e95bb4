// density.hpp - Gaussian kernel density estimation.
//
// Two estimators drive sample selection: p(x|+) fit on the labeled positives
// and p(x) fit on all available (pool + labeled) data. Their ratio
// a(x) = p(x|+) / p(x) is the single statistic both closed-form selection
// rules consume.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ocal {

// Isotropic Gaussian-kernel mixture: mean of n kernels with one shared
// scalar bandwidth. Immutable after fit.
struct KdeModel {
  std::vector<std::vector<double>> points;
  double bandwidth = 1.0;
  int dim = 0;
};

inline KdeModel fit_kde(const std::vector<std::vector<double>>& points, double h) {
  if (points.empty()) throw std::invalid_argument("fit_kde: empty point set");
  if (!(h > 0.0)) throw std::invalid_argument("fit_kde: bandwidth must be positive");
  const int d = static_cast<int>(points.front().size());
  if (d < 1) throw std::invalid_argument("fit_kde: zero-dimensional points");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != d) throw std::invalid_argument("fit_kde: inconsistent dimensions");
  return KdeModel{points, h, d};
}

// Value of a single kernel at its own center divided by n; the model's
// density can never exceed n times this, and it scales the underflow floor
// used by likelihood_ratio.
inline double kde_peak_kernel_value(const KdeModel& m) {
  const double h2 = m.bandwidth * m.bandwidth;
  return std::pow(2.0 * std::numbers::pi * h2, -0.5 * m.dim) / static_cast<double>(m.points.size());
}

inline double kde_evaluate(const KdeModel& m, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != m.dim)
    throw std::invalid_argument("kde_evaluate: dimension mismatch");
  const double h2 = m.bandwidth * m.bandwidth;
  const double norm = std::pow(2.0 * std::numbers::pi * h2, -0.5 * m.dim);
  double sum = 0.0;
  for (const auto& p : m.points) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double dj = x[j] - p[j];
      r2 += dj * dj;
    }
    sum += std::exp(-r2 / (2.0 * h2));
  }
  return norm * sum / static_cast<double>(m.points.size());
}

// Rule-of-thumb bandwidth: mean per-dimension sample standard deviation
// times n^(-1/(d+4)). Fallback when cross-validation is infeasible.
inline double silverman_bandwidth(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw std::invalid_argument("silverman_bandwidth: empty point set");
  const std::size_t n = points.size();
  const std::size_t d = points.front().size();
  double sigma = 1.0;
  if (n >= 2) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0.0;
      for (const auto& p : points) mean += p[j];
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (const auto& p : points) ss += (p[j] - mean) * (p[j] - mean);
      acc += std::sqrt(ss / static_cast<double>(n - 1));
    }
    sigma = acc / static_cast<double>(d);
    if (!(sigma > 0.0)) sigma = 1.0;  // all points identical
  }
  return sigma * std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 4.0));
}

// Grid search maximizing the leave-one-out log-likelihood
// sum_i log p_{-i}(x_i). Ties break toward the smaller bandwidth. Returns
// nullopt when every candidate scores -inf (degenerate duplicates with tiny
// bandwidths); the caller is expected to fall back to silverman_bandwidth.
inline std::optional<double> select_bandwidth_loo(const std::vector<std::vector<double>>& points,
                                                  const std::vector<double>& grid) {
  if (points.size() < 2) throw std::invalid_argument("select_bandwidth_loo: need at least 2 points");
  if (grid.empty()) throw std::invalid_argument("select_bandwidth_loo: empty bandwidth grid");
  for (double h : grid)
    if (!(h > 0.0)) throw std::invalid_argument("select_bandwidth_loo: bandwidths must be positive");

  const std::size_t n = points.size();
  const std::size_t d = points.front().size();
  std::vector<double> dist2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double dk = points[i][k] - points[j][k];
        r2 += dk * dk;
      }
      dist2[i * n + j] = dist2[j * n + i] = r2;
    }

  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  double best_h = 0.0;
  double best_ll = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (double h : sorted) {
    const double h2 = h * h;
    const double log_norm =
        -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi * h2) -
        std::log(static_cast<double>(n - 1));
    double ll = 0.0;
    for (std::size_t i = 0; i < n && std::isfinite(ll); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) sum += std::exp(-dist2[i * n + j] / (2.0 * h2));
      ll += (sum > 0.0) ? log_norm + std::log(sum) : -std::numeric_limits<double>::infinity();
    }
    if (std::isfinite(ll) && ll > best_ll) {
      best_ll = ll;
      best_h = h;
      found = true;
    }
  }
  if (!found) return std::nullopt;
  return best_h;
}

// a(x) = p(x|+) / p(x), with the denominator floored at a tiny multiple of
// the `all` model's peak kernel value so that points where both densities
// underflow stay finite.
inline double likelihood_ratio(const KdeModel& pos, const KdeModel& all,
                               const std::vector<double>& x) {
  if (pos.dim != all.dim) throw std::invalid_argument("likelihood_ratio: model dimensions differ");
  const double num = kde_evaluate(pos, x);
  const double den = kde_evaluate(all, x);
  const double floor = 1e-15 * kde_peak_kernel_value(all);
  return num / std::max(den, floor);
}

// Estimate of the unavailable negative-class density,
// (p(x) - p(x|+) * prior) / (1 - prior), clamped at zero. Diagnostic only:
// the selection rules eliminate p(x|-) analytically and never call this.
inline double negative_density_estimate(const KdeModel& pos, const KdeModel& all,
                                        const std::vector<double>& x, double prior) {
  if (!(prior > 0.0 && prior < 1.0))
    throw std::invalid_argument("negative_density_estimate: prior must lie in (0,1)");
  const double p_all = kde_evaluate(all, x);
  const double p_pos = kde_evaluate(pos, x);
  return std::max(0.0, (p_all - p_pos * prior) / (1.0 - prior));
}

}  // namespace ocal
