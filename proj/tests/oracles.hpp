#pragma once

// Independent reference computations for the tests. Nothing here calls the
// code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "actionswitch/switchboard.hpp"
#include "actionswitch/tensor.hpp"

namespace actionswitch::oracle {

// Central differences of f at x, one coordinate at a time.
inline std::vector<double> central_diff(const std::function<double(std::vector<double>&)>& f,
                                        std::vector<double> x, double eps) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + eps;
    const double up = f(x);
    x[i] = orig - eps;
    const double down = f(x);
    x[i] = orig;
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

// Relative error with a floor so that two near-zero entries compare as equal.
inline double rel_err(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Plain-loop softmax cross entropy, independent of the library's log-sum-exp.
inline double naive_neg_log_softmax(std::span<const double> row, std::size_t target) {
  double m = row[0];
  for (double v : row) m = std::max(m, v);
  double z = 0.0;
  for (double v : row) z += std::exp(v - m);
  return -(row[target] - m - std::log(z));
}

inline std::size_t naive_argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

// Equation-level loss: mean CE + alpha * mean of the conservativeness term over
// the steps where the argmax changes.
inline double reference_loss(const Matrix& logits, const std::vector<std::size_t>& gt, double alpha) {
  const std::size_t T = logits.rows();
  double ce = 0.0;
  for (std::size_t t = 0; t < T; ++t) ce += naive_neg_log_softmax(logits.row(t), gt[t]);
  ce /= static_cast<double>(T);
  double cc = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 1; t < T; ++t) {
    const std::size_t prev = naive_argmax(logits.row(t - 1));
    if (naive_argmax(logits.row(t)) != prev) {
      cc += naive_neg_log_softmax(logits.row(t), prev);
      ++n;
    }
  }
  return ce + alpha * (n ? cc / static_cast<double>(n) : 0.0);
}

// Smallest gap between the top two logits of any row.
inline double min_top2_gap(const Matrix& logits) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    auto row = logits.row(t);
    std::vector<double> v(row.begin(), row.end());
    std::partial_sort(v.begin(), v.begin() + 2, v.end(), std::greater<>());
    gap = std::min(gap, v[0] - v[1]);
  }
  return gap;
}

// Minimum over all injective assignments of min(m, n) pairs, summed in row order.
inline double brute_force_assignment(const Matrix& cost) {
  const std::size_t m = cost.rows(), n = cost.cols();
  if (m == 0 || n == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  if (m <= n) {
    std::vector<std::size_t> cols(n);
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    // every ordered choice of m distinct columns; permutations of n with the
    // tail ignored enumerate them (with repeats, fine at these sizes)
    do {
      double total = 0.0;
      for (std::size_t r = 0; r < m; ++r) total += cost(r, cols[r]);
      best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
  } else {
    std::vector<std::size_t> rows(m);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    do {
      // column c takes row rows[c]; sum in row order
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t c = 0; c < n; ++c) pairs.emplace_back(rows[c], c);
      std::sort(pairs.begin(), pairs.end());
      double total = 0.0;
      for (auto [r, c] : pairs) total += cost(r, c);
      best = std::min(best, total);
    } while (std::next_permutation(rows.begin(), rows.end()));
  }
  return best;
}

inline double interval_iou(std::int64_t s1, std::int64_t e1, std::int64_t s2, std::int64_t e2) {
  // frame-set counting
  std::int64_t inter = 0, uni = 0;
  for (std::int64_t t = std::min(s1, s2); t <= std::max(e1, e2); ++t) {
    const bool a = t >= s1 && t <= e1;
    const bool b = t >= s2 && t <= e2;
    inter += a && b;
    uni += a || b;
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// Max number of pairs with tIoU >= theta over all injective partial matchings.
inline std::size_t brute_force_tp(const std::vector<ActionInterval>& preds,
                                  const std::vector<ActionInterval>& gts, double theta) {
  std::vector<bool> used(gts.size(), false);
  std::function<std::size_t(std::size_t)> rec = [&](std::size_t i) -> std::size_t {
    if (i == preds.size()) return 0;
    std::size_t best = rec(i + 1);
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (used[j]) continue;
      const double iou = interval_iou(preds[i].start_frame, preds[i].end_frame, gts[j].start_frame,
                                      gts[j].end_frame);
      if (iou < theta) continue;
      used[j] = true;
      best = std::max(best, 1 + rec(i + 1));
      used[j] = false;
    }
    return best;
  };
  return rec(0);
}

// Random interval sets where every switch track holds disjoint, non-touching
// intervals, so concurrency and adjacency both stay within `tracks`.
inline std::vector<ActionInterval> random_track_instances(std::mt19937_64& rng, int tracks,
                                                          std::int64_t length) {
  std::vector<ActionInterval> out;
  std::uniform_int_distribution<std::int64_t> gap(1, 8);
  std::uniform_int_distribution<std::int64_t> dur(1, 12);
  for (int k = 0; k < tracks; ++k) {
    std::int64_t t = gap(rng) - 1;
    while (t < length) {
      const std::int64_t end = std::min(t + dur(rng) - 1, length - 1);
      out.push_back({.start_frame = t, .end_frame = end});
      t = end + 1 + gap(rng);
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace actionswitch::oracle
