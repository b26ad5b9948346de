#pragma once

// Synthetic train / held-out splits for sweeps.

#include <cstdint>
#include <vector>

#include "actionswitch/synthgen.hpp"
#include "actionswitch/trainer.hpp"

namespace actionswitch {

struct SyntheticSplit {
  std::vector<Video> train;
  std::vector<Video> eval;
  double train_overlap = 0.0;  // overlap_fraction pooled over training frames
};

// Cuts train_frames and eval_frames into videos of video_length frames (the
// last one may be shorter). Every video gets its own stream seed; all share the
// class signatures of `base`. Deterministic in (base, seed).
SyntheticSplit make_synthetic_split(const SynthConfig& base, std::int64_t train_frames,
                                    std::int64_t eval_frames, std::int64_t video_length,
                                    std::uint64_t seed);

}  // namespace actionswitch
