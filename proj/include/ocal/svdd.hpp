// svdd.hpp - support vector data description.
//
// Finds the smallest kernel-space hypersphere around the positive class;
// labeled negatives enter as penalized outliers with sign -1. The dual
//
//   maximize  sum_i s_i a_i K(x_i,x_i) - sum_ij s_i s_j a_i a_j K(x_i,x_j)
//   s.t.      sum_i s_i a_i = 1,   0 <= a_i <= C(class of i)
//
// is solved by pairwise coordinate ascent on the most violating pair,
// libsvm-style. With G_i = K(x_i,x_i) - 2 sum_j s_j a_j K(x_i,x_j) the
// stationarity conditions reduce to max_{i in I_up} G_i - min_{i in I_low}
// G_i <= tol.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocal/data.hpp"

namespace ocal {

enum class KernelKind { RBF, Linear };

struct KernelSpec {
  KernelKind kind = KernelKind::RBF;
  double gamma = 1.0;  // RBF only: K(x,y) = exp(-gamma * |x-y|^2)
};

inline double kernel_eval(const KernelSpec& k, const std::vector<double>& a,
                          const std::vector<double>& b) {
  if (k.kind == KernelKind::Linear) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  double r2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    r2 += d * d;
  }
  return std::exp(-k.gamma * r2);
}

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SvddModel {
  std::vector<std::vector<double>> train_points;
  std::vector<double> alphas;
  std::vector<int> signs;  // +1 positive, -1 negative
  KernelSpec kernel;
  double radius = 0.0;
  double center_norm_sq = 0.0;
  double c_pos = 1.0;
  double c_neg = 1.0;
  double kkt_gap = 0.0;  // final max violation m - M
  std::size_t pair_updates = 0;
  int dim = 0;

  double box(std::size_t i) const { return signs[i] > 0 ? c_pos : c_neg; }
};

namespace detail {

inline double sq_distance_to_center(const SvddModel& m, const std::vector<double>& x) {
  double cross = 0.0;
  for (std::size_t i = 0; i < m.train_points.size(); ++i)
    if (m.alphas[i] > 0.0)
      cross += m.signs[i] * m.alphas[i] * kernel_eval(m.kernel, x, m.train_points[i]);
  return kernel_eval(m.kernel, x, x) - 2.0 * cross + m.center_norm_sq;
}

}  // namespace detail

inline SvddModel train_svdd(const std::vector<std::vector<double>>& positives,
                            const std::vector<std::vector<double>>& negatives,
                            const KernelSpec& kernel, double c_pos, double c_neg,
                            double tol = 1e-6, std::size_t max_pair_updates = 100000) {
  if (positives.empty()) throw std::invalid_argument("train_svdd: need at least one positive");
  if (!(c_pos > 0.0) || !(c_neg > 0.0))
    throw std::invalid_argument("train_svdd: box constraints must be positive");
  if (kernel.kind == KernelKind::RBF && !(kernel.gamma > 0.0))
    throw std::invalid_argument("train_svdd: RBF gamma must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("train_svdd: tol must be positive");

  const std::size_t np = positives.size();
  if (c_pos * static_cast<double>(np) < 1.0 - 1e-12)
    throw SolverError("train_svdd: infeasible, c_pos * |P| = " +
                      std::to_string(c_pos * static_cast<double>(np)) +
                      " < 1 so sum s_i a_i = 1 is unreachable");

  SvddModel m;
  m.kernel = kernel;
  m.c_pos = c_pos;
  m.c_neg = c_neg;
  m.dim = static_cast<int>(positives.front().size());
  m.train_points = positives;
  m.train_points.insert(m.train_points.end(), negatives.begin(), negatives.end());
  const std::size_t n = m.train_points.size();
  for (const auto& p : m.train_points)
    if (static_cast<int>(p.size()) != m.dim)
      throw std::invalid_argument("train_svdd: inconsistent dimensions");
  m.signs.assign(n, 1);
  for (std::size_t i = np; i < n; ++i) m.signs[i] = -1;

  // Dense kernel cache; pool sizes here are small.
  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      K[i * n + j] = K[j * n + i] = kernel_eval(kernel, m.train_points[i], m.train_points[j]);

  m.alphas.assign(n, 0.0);
  const double init = std::min(1.0 / static_cast<double>(np), c_pos);
  for (std::size_t i = 0; i < np; ++i) m.alphas[i] = init;

  std::vector<double> grad(n);  // G_i
  for (std::size_t i = 0; i < n; ++i) {
    double cross = 0.0;
    for (std::size_t j = 0; j < np; ++j) cross += m.alphas[j] * K[i * n + j];
    grad[i] = K[i * n + i] - 2.0 * cross;
  }

  const auto snap = [&](std::size_t i) {
    const double c = m.box(i);
    if (m.alphas[i] < 1e-12) m.alphas[i] = 0.0;
    if (m.alphas[i] > c - 1e-12 * std::max(1.0, c)) m.alphas[i] = c;
  };

  std::size_t updates = 0;
  double gap = 0.0;
  while (true) {
    // most violating pair: u maximizes G over I_up, v minimizes G over I_low
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    std::ptrdiff_t u = -1, v = -1;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = m.box(i);
      const bool in_up = (m.signs[i] > 0) ? (m.alphas[i] < c) : (m.alphas[i] > 0.0);
      const bool in_low = (m.signs[i] > 0) ? (m.alphas[i] > 0.0) : (m.alphas[i] < c);
      if (in_up && grad[i] > m_up) {
        m_up = grad[i];
        u = static_cast<std::ptrdiff_t>(i);
      }
      if (in_low && grad[i] < m_low) {
        m_low = grad[i];
        v = static_cast<std::ptrdiff_t>(i);
      }
    }
    gap = (u >= 0 && v >= 0) ? m_up - m_low : 0.0;
    if (gap <= tol) break;
    if (updates >= max_pair_updates)
      throw SolverError("train_svdd: no convergence after " + std::to_string(max_pair_updates) +
                        " pair updates, KKT residual " + std::to_string(gap));

    const auto iu = static_cast<std::size_t>(u);
    const auto iv = static_cast<std::size_t>(v);
    // ascent direction a_u += s_u*delta, a_v -= s_v*delta keeps sum s_i a_i fixed
    const double room_u = (m.signs[iu] > 0) ? m.box(iu) - m.alphas[iu] : m.alphas[iu];
    const double room_v = (m.signs[iv] > 0) ? m.alphas[iv] : m.box(iv) - m.alphas[iv];
    const double eta = K[iu * n + iu] - 2.0 * K[iu * n + iv] + K[iv * n + iv];
    double delta = std::min(room_u, room_v);
    if (eta > 1e-300) delta = std::min(delta, gap / (2.0 * eta));

    m.alphas[iu] += m.signs[iu] * delta;
    m.alphas[iv] -= m.signs[iv] * delta;
    snap(iu);
    snap(iv);
    for (std::size_t i = 0; i < n; ++i) grad[i] -= 2.0 * delta * (K[i * n + iu] - K[i * n + iv]);
    ++updates;
  }
  m.pair_updates = updates;
  m.kkt_gap = std::max(0.0, gap);

  double cns = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (m.alphas[i] <= 0.0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (m.alphas[j] > 0.0)
        cns += m.signs[i] * m.signs[j] * m.alphas[i] * m.alphas[j] * K[i * n + j];
  }
  m.center_norm_sq = cns;

  // Radius from unbounded support vectors, averaged; if every alpha sits on a
  // bound, fall back to the farthest positive support vector.
  double r_acc = 0.0;
  std::size_t r_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = m.box(i);
    if (m.alphas[i] > 1e-8 * std::max(1.0, c) && m.alphas[i] < c - 1e-8 * std::max(1.0, c)) {
      r_acc += std::sqrt(std::max(0.0, detail::sq_distance_to_center(m, m.train_points[i])));
      ++r_count;
    }
  }
  if (r_count > 0) {
    m.radius = r_acc / static_cast<double>(r_count);
  } else {
    double r_max = 0.0;
    for (std::size_t i = 0; i < np; ++i)
      if (m.alphas[i] > 0.0)
        r_max = std::max(r_max, std::sqrt(std::max(0.0, detail::sq_distance_to_center(
                                                            m, m.train_points[i]))));
    m.radius = r_max;
  }
  return m;
}

inline double kernel_distance_to_center(const SvddModel& m, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != m.dim)
    throw std::invalid_argument("kernel_distance_to_center: dimension mismatch");
  return std::sqrt(std::max(0.0, detail::sq_distance_to_center(m, x)));
}

// f(x) = R - d(x, center); higher means more target-like.
inline double svdd_score(const SvddModel& m, const std::vector<double>& x) {
  return m.radius - kernel_distance_to_center(m, x);
}

// Boundary counts as positive.
inline Label svdd_predict(const SvddModel& m, const std::vector<double>& x) {
  return svdd_score(m, x) >= 0.0 ? Label::Positive : Label::Negative;
}

}  // namespace ocal
