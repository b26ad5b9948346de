#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actionswitch/conservativeness.hpp"
#include "actionswitch/frame_scorer.hpp"
#include "actionswitch/kernels.hpp"
#include "actionswitch/metrics.hpp"
#include "actionswitch/switchboard.hpp"

namespace actionswitch {

struct TrainConfig {
  double alpha = 0.0;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 10;
  std::size_t bptt_len = 128;
  std::uint64_t seed = 0;
  int num_switches = 2;
  std::size_t hidden_dim = 32;
};

void validate(const TrainConfig& config);

struct Video {
  std::string id;
  Matrix features;                        // T x D
  std::vector<ActionInterval> instances;  // ground truth
};

// Adam with bias-corrected moments over a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t num_params, double lr, double beta1, double beta2, double eps);

  void step(std::span<double> params, std::span<const double> grads);
  std::int64_t steps_taken() const { return t_; }

 private:
  kernels::AdamStep hyper_;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

struct EpochStats {
  int epoch = 0;
  double total = 0.0;   // frame-weighted mean over windows
  double ce = 0.0;
  double cons = 0.0;
  std::size_t num_cc_positions = 0;
  std::size_t num_windows = 0;
  std::size_t num_frames = 0;
};

struct TrainResult {
  ScorerParams params;
  std::vector<EpochStats> history;
  std::size_t dropped_instances = 0;   // GT lost to switch capacity
  std::size_t merged_instances = 0;    // back-to-back GT merged by encoding
};

// One video per step, windows of bptt_len frames, hidden state carried across
// windows without gradient. Deterministic for a given seed.
TrainResult train(std::span<const Video> dataset, const TrainConfig& config);

// Per-frame argmax states from a streaming forward pass.
StateSequence predict_states(const ScorerParams& params, ConstMatrixRef features);

// Streaming forward -> argmax -> StreamDecoder, sorted by interval_less.
// Each instance is scored with the mean softmax probability of the winning
// state over its frames.
std::vector<ActionInterval> infer_instances(const ScorerParams& params, ConstMatrixRef features,
                                            const SwitchConfig& config);

struct SweepRow {
  int num_switches = 0;
  double alpha = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t num_proposals = 0;
  std::size_t num_gt = 0;
  std::int64_t seed = 0;  // -1 on median rows
  bool failed = false;
  std::string error;
};

struct SweepSpec {
  std::vector<double> alphas;
  std::vector<int> switch_counts;
  std::vector<std::uint64_t> seeds;
  TrainConfig base;  // alpha, num_switches and seed are overridden per cell
  double tiou_threshold = 0.5;
  unsigned jobs = 1;
};

struct SweepResult {
  std::vector<SweepRow> per_seed;  // sorted by (num_switches, alpha, seed)
  std::vector<SweepRow> median;    // one per (num_switches, alpha), per-metric medians
};

SweepResult sweep_alpha(std::span<const Video> train_set, std::span<const Video> eval_set,
                        const SweepSpec& spec);

// Median of a single metric; even counts average the two middle values.
double median(std::vector<double> values);

}  // namespace actionswitch
