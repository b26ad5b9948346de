#include "actionswitch/experiment.hpp"

#include <random>
#include <string>

#include "actionswitch/errors.hpp"

namespace actionswitch {

namespace {

std::vector<Video> make_videos(const SynthConfig& base, std::int64_t frames, std::int64_t video_length,
                               std::mt19937_64& seeds, const std::string& prefix) {
  std::vector<Video> out;
  for (std::int64_t done = 0; done < frames; done += video_length) {
    SynthConfig c = base;
    c.length = std::min(video_length, frames - done);
    c.seed = seeds();
    c.signature_seed = base.signature_seed.value_or(base.seed);
    auto s = generate_stream(c);
    out.push_back({prefix + std::to_string(out.size()), std::move(s.features), std::move(s.instances)});
  }
  return out;
}

}  // namespace

SyntheticSplit make_synthetic_split(const SynthConfig& base, std::int64_t train_frames,
                                    std::int64_t eval_frames, std::int64_t video_length,
                                    std::uint64_t seed) {
  if (train_frames < 1 || eval_frames < 1 || video_length < 1) {
    throw DomainError("split sizes must be positive");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 seeds(seq);
  SyntheticSplit split;
  split.train = make_videos(base, train_frames, video_length, seeds, "train_");
  split.eval = make_videos(base, eval_frames, video_length, seeds, "eval_");

  std::size_t covered = 0, overlapped = 0;
  for (const auto& v : split.train) {
    std::vector<int> count(v.features.rows(), 0);
    for (const auto& inst : v.instances) {
      for (auto t = inst.start_frame; t <= inst.end_frame; ++t) ++count[static_cast<std::size_t>(t)];
    }
    for (int c : count) {
      covered += c >= 1;
      overlapped += c >= 2;
    }
  }
  split.train_overlap = covered ? static_cast<double>(overlapped) / static_cast<double>(covered) : 0.0;
  return split;
}

}  // namespace actionswitch
