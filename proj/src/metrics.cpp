#include "actionswitch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "actionswitch/errors.hpp"

namespace actionswitch {

double tiou(const ActionInterval& a, const ActionInterval& b) {
  const std::int64_t inter =
      std::min(a.end_frame, b.end_frame) - std::max(a.start_frame, b.start_frame) + 1;
  if (inter <= 0) return 0.0;
  const std::int64_t uni = a.length() + b.length() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// Rows <= cols. p[j] = row matched to column j (1-based, 0 = none).
std::vector<std::size_t> hungarian_rows_le_cols(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t m = a.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  return p;
}

void check_aligned(const VideoSet& preds, const VideoSet& gts) {
  if (preds.size() != gts.size()) {
    throw DomainError("prediction and ground-truth video counts differ (" +
                      std::to_string(preds.size()) + " vs " + std::to_string(gts.size()) + ")");
  }
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

struct RankedPred {
  std::size_t video;
  std::size_t index;
  const ActionInterval* inst;
};

// Score descending, then earlier start, then video/end/index for a total order.
std::vector<RankedPred> rank_predictions(const VideoSet& preds,
                                         const std::function<bool(const ActionInterval&)>& keep) {
  std::vector<RankedPred> ranked;
  for (std::size_t v = 0; v < preds.size(); ++v) {
    for (std::size_t i = 0; i < preds[v].size(); ++i) {
      if (keep(preds[v][i])) ranked.push_back({v, i, &preds[v][i]});
    }
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedPred& a, const RankedPred& b) {
    if (*a.inst->score != *b.inst->score) return *a.inst->score > *b.inst->score;
    if (a.inst->start_frame != b.inst->start_frame) {
      return a.inst->start_frame < b.inst->start_frame;
    }
    if (a.video != b.video) return a.video < b.video;
    if (a.inst->end_frame != b.inst->end_frame) return a.inst->end_frame < b.inst->end_frame;
    return a.index < b.index;
  });
  return ranked;
}

}  // namespace

Assignment hungarian_assign(const Matrix& cost) {
  Assignment out;
  if (cost.rows() == 0 || cost.cols() == 0) return out;
  for (double c : cost.values()) {
    if (!std::isfinite(c)) throw DomainError("non-finite assignment cost");
  }
  const bool transposed = cost.rows() > cost.cols();
  Matrix a = cost;
  if (transposed) {
    a = Matrix(cost.cols(), cost.rows());
    for (std::size_t r = 0; r < cost.rows(); ++r) {
      for (std::size_t c = 0; c < cost.cols(); ++c) a(c, r) = cost(r, c);
    }
  }
  const auto p = hungarian_rows_le_cols(a);
  for (std::size_t j = 1; j < p.size(); ++j) {
    if (p[j] == 0) continue;
    const std::size_t row = p[j] - 1;
    const std::size_t col = j - 1;
    out.pairs.emplace_back(transposed ? col : row, transposed ? row : col);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  for (const auto& [r, c] : out.pairs) out.total_cost += cost(r, c);
  return out;
}

MatchReport f1_at_tiou(const VideoSet& preds, const VideoSet& gts, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw DomainError("tIoU threshold must be in (0, 1]");
  check_aligned(preds, gts);
  MatchReport rep;
  for (std::size_t v = 0; v < preds.size(); ++v) {
    const auto& pv = preds[v];
    const auto& gv = gts[v];
    rep.num_pred += pv.size();
    rep.num_gt += gv.size();
    if (pv.empty() || gv.empty()) continue;
    // A pass is worth more than any possible tIoU sum, so pass count wins first.
    const double pass_weight = static_cast<double>(std::min(pv.size(), gv.size())) + 1.0;
    Matrix cost(pv.size(), gv.size());
    Matrix iou(pv.size(), gv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) {
      for (std::size_t j = 0; j < gv.size(); ++j) {
        iou(i, j) = tiou(pv[i], gv[j]);
        cost(i, j) = -(iou(i, j) + (iou(i, j) >= threshold ? pass_weight : 0.0));
      }
    }
    for (const auto& [i, j] : hungarian_assign(cost).pairs) {
      if (iou(i, j) >= threshold) rep.pairs.push_back({v, i, j, iou(i, j)});
    }
  }
  rep.tp = rep.pairs.size();
  if (rep.num_pred == 0 && rep.num_gt == 0) {
    rep.empty_convention = true;
    rep.precision = rep.recall = rep.f1 = 1.0;
    return rep;
  }
  rep.precision = safe_ratio(static_cast<double>(rep.tp), static_cast<double>(rep.num_pred));
  rep.recall = safe_ratio(static_cast<double>(rep.tp), static_cast<double>(rep.num_gt));
  const double pr = rep.precision + rep.recall;
  rep.f1 = pr > 0.0 ? 2.0 * rep.precision * rep.recall / pr : 0.0;
  return rep;
}

double average_precision(const std::vector<bool>& hits, std::size_t num_gt) {
  if (num_gt == 0 || hits.empty()) return 0.0;
  std::vector<double> precision(hits.size());
  std::size_t tp = 0;
  for (std::size_t r = 0; r < hits.size(); ++r) {
    tp += hits[r] ? 1 : 0;
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
  }
  for (std::size_t r = hits.size() - 1; r-- > 0;) {
    precision[r] = std::max(precision[r], precision[r + 1]);
  }
  double ap = 0.0;
  for (std::size_t r = 0; r < hits.size(); ++r) {
    if (hits[r]) ap += precision[r];
  }
  return ap / static_cast<double>(num_gt);
}

IntervalMapReport interval_map(const VideoSet& preds, const VideoSet& gts,
                               std::span<const double> thresholds) {
  check_aligned(preds, gts);
  for (const auto& pv : preds) {
    for (const auto& p : pv) {
      if (!p.class_id || !p.score) throw DomainError("mAP needs class_id and score on every prediction");
    }
  }
  std::map<int, std::size_t> gt_count;
  for (const auto& gv : gts) {
    for (const auto& g : gv) {
      if (!g.class_id) throw DomainError("mAP needs class_id on every ground-truth instance");
      ++gt_count[*g.class_id];
    }
  }

  IntervalMapReport rep;
  rep.thresholds.assign(thresholds.begin(), thresholds.end());
  for (double theta : thresholds) {
    if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("tIoU threshold must be in (0, 1]");
    std::map<int, double> per_class;
    for (const auto& [cls, n_gt] : gt_count) {
      const int c = cls;
      const auto ranked = rank_predictions(preds, [c](const ActionInterval& a) { return *a.class_id == c; });
      std::vector<std::vector<bool>> taken(gts.size());
      for (std::size_t v = 0; v < gts.size(); ++v) taken[v].assign(gts[v].size(), false);
      std::vector<bool> hits;
      hits.reserve(ranked.size());
      for (const auto& rp : ranked) {
        const auto& gv = gts[rp.video];
        double best = -1.0;
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < gv.size(); ++j) {
          if (taken[rp.video][j] || *gv[j].class_id != c) continue;
          const double iou = tiou(*rp.inst, gv[j]);
          if (iou >= theta && iou > best) {
            best = iou;
            best_j = j;
          }
        }
        if (best >= 0.0) taken[rp.video][best_j] = true;
        hits.push_back(best >= 0.0);
      }
      per_class[c] = average_precision(hits, n_gt);
    }
    double sum = 0.0;
    for (const auto& [c, ap] : per_class) sum += ap;
    rep.map_per_threshold.push_back(per_class.empty() ? 0.0 : sum / static_cast<double>(per_class.size()));
    rep.ap_per_class.push_back(std::move(per_class));
  }
  if (!rep.map_per_threshold.empty()) {
    rep.average_map = std::accumulate(rep.map_per_threshold.begin(), rep.map_per_threshold.end(), 0.0) /
                      static_cast<double>(rep.map_per_threshold.size());
  }
  return rep;
}

PointMapReport point_map(const VideoSet& preds, const VideoSet& gts,
                         std::span<const std::int64_t> offsets) {
  check_aligned(preds, gts);
  bool classwise = true;
  bool any_gt = false;
  for (const auto& gv : gts) {
    for (const auto& g : gv) {
      any_gt = true;
      if (!g.class_id) classwise = false;
    }
  }
  classwise = classwise && any_gt;
  for (const auto& pv : preds) {
    for (const auto& p : pv) {
      if (!p.score) throw DomainError("p-AP needs a score on every prediction");
      if (classwise && !p.class_id) {
        throw DomainError("ground truth is classed; every prediction needs class_id");
      }
    }
  }
  std::map<int, std::size_t> gt_count;  // key -1 = pooled
  for (const auto& gv : gts) {
    for (const auto& g : gv) ++gt_count[classwise ? *g.class_id : -1];
  }

  PointMapReport rep;
  rep.classwise = classwise;
  rep.offsets.assign(offsets.begin(), offsets.end());
  for (std::int64_t offset : offsets) {
    if (offset <= 0) throw DomainError("offsets must be positive");
    double sum = 0.0;
    for (const auto& [cls, n_gt] : gt_count) {
      const int c = cls;
      auto same_class = [classwise, c](const ActionInterval& a) { return !classwise || *a.class_id == c; };
      const auto ranked = rank_predictions(preds, same_class);
      std::vector<std::vector<bool>> taken(gts.size());
      for (std::size_t v = 0; v < gts.size(); ++v) taken[v].assign(gts[v].size(), false);
      std::vector<bool> hits;
      hits.reserve(ranked.size());
      for (const auto& rp : ranked) {
        const auto& gv = gts[rp.video];
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < gv.size(); ++j) {
          if (taken[rp.video][j] || !same_class(gv[j])) continue;
          const std::int64_t dist = std::llabs(rp.inst->start_frame - gv[j].start_frame);
          if (dist <= offset && dist < best) {
            best = dist;
            best_j = j;
          }
        }
        const bool hit = best != std::numeric_limits<std::int64_t>::max();
        if (hit) taken[rp.video][best_j] = true;
        hits.push_back(hit);
      }
      sum += average_precision(hits, n_gt);
    }
    rep.ap_per_offset.push_back(gt_count.empty() ? 0.0 : sum / static_cast<double>(gt_count.size()));
  }
  if (!rep.ap_per_offset.empty()) {
    rep.mean_ap = std::accumulate(rep.ap_per_offset.begin(), rep.ap_per_offset.end(), 0.0) /
                  static_cast<double>(rep.ap_per_offset.size());
  }
  return rep;
}

}  // namespace actionswitch
