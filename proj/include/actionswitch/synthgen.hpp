#pragma once

// Seeded synthetic streams: Poisson instance arrivals with uniform durations,
// features = sum of the active instances' class signatures + Gaussian noise.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "actionswitch/switchboard.hpp"
#include "actionswitch/tensor.hpp"

namespace actionswitch {

struct SynthConfig {
  std::int64_t length = 2000;
  double arrival_rate = 0.02;  // expected starts per frame
  std::int64_t duration_min = 10;
  std::int64_t duration_max = 60;
  int max_concurrent = 2;
  int num_classes = 4;
  std::size_t feature_dim = 16;
  double noise_sigma = 0.3;
  std::uint64_t seed = 0;
  // Keep arrivals that push concurrency past max_concurrent.
  bool allow_overflow = false;
  // Seed for the class signatures; defaults to `seed`. Streams that share it
  // share their classes, so a model trained on one can be scored on another.
  std::optional<std::uint64_t> signature_seed;
};

void validate(const SynthConfig& config);

struct SynthStream {
  Matrix features;  // length x feature_dim, values exactly representable as float
  std::vector<ActionInterval> instances;  // class_id set, sorted by interval_less
  Matrix signatures;  // num_classes x feature_dim, unit rows
};

SynthStream generate_stream(const SynthConfig& config);

// Fraction of frames covered by at least two instances, over frames covered by
// at least one.
double overlap_fraction(const std::vector<ActionInterval>& instances, std::int64_t length);
double mean_concurrency(const std::vector<ActionInterval>& instances, std::int64_t length);
int max_concurrency(const std::vector<ActionInterval>& instances, std::int64_t length);

// "ASWF" feature file: version, T (u64), D (u32), row-major float32, little-endian.
void save_features(const std::filesystem::path& path, const Matrix& features);
Matrix load_features(const std::filesystem::path& path);

inline constexpr std::uint32_t kFeatureFileVersion = 1;

}  // namespace actionswitch
