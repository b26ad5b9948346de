#pragma once

// Detection metrics over per-video instance lists. A "video set" is a vector
// indexed by video; predictions and ground truth must be aligned by index.

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "actionswitch/switchboard.hpp"
#include "actionswitch/tensor.hpp"

namespace actionswitch {

using VideoSet = std::vector<std::vector<ActionInterval>>;

// Intersection over union with inclusive frame counts.
double tiou(const ActionInterval& a, const ActionInterval& b);

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), sorted by row
  double total_cost = 0.0;  // summed in row order
};

// Minimum-cost injective assignment of min(m, n) pairs (Kuhn-Munkres with
// potentials, O(n^2 m)). Empty input yields an empty assignment.
Assignment hungarian_assign(const Matrix& cost);

struct MatchPair {
  std::size_t video = 0;
  std::size_t pred = 0;
  std::size_t gt = 0;
  double tiou = 0.0;
};

struct MatchReport {
  std::vector<MatchPair> pairs;  // matched pairs with tiou >= threshold
  std::size_t tp = 0;
  std::size_t num_pred = 0;
  std::size_t num_gt = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool empty_convention = false;  // no preds and no gts anywhere: P = R = F1 = 1
};

// Class-agnostic F1. Per video, a Hungarian match maximizes first the number
// of pairs reaching `threshold` and then their summed tIoU; counts are
// micro-averaged across videos.
MatchReport f1_at_tiou(const VideoSet& preds, const VideoSet& gts, double threshold);

// Area under the monotone precision envelope. `hits` is in rank order.
double average_precision(const std::vector<bool>& hits, std::size_t num_gt);

struct IntervalMapReport {
  std::vector<double> thresholds;
  // per threshold: class id -> AP (classes with at least one ground truth)
  std::vector<std::map<int, double>> ap_per_class;
  std::vector<double> map_per_threshold;
  double average_map = 0.0;
};

// Every prediction needs class_id and score; every gt needs class_id.
IntervalMapReport interval_map(const VideoSet& preds, const VideoSet& gts,
                               std::span<const double> thresholds);

struct PointMapReport {
  std::vector<std::int64_t> offsets;
  std::vector<double> ap_per_offset;
  double mean_ap = 0.0;
  bool classwise = false;
};

// Point-level AP on start frames. Classwise when every gt has a class_id,
// otherwise one pooled AP. Scores are required; offsets are in frames.
PointMapReport point_map(const VideoSet& preds, const VideoSet& gts,
                         std::span<const std::int64_t> offsets);

}  // namespace actionswitch
