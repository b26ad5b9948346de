#include "actionswitch/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "actionswitch/errors.hpp"
#include "binary_io.hpp"

namespace actionswitch {

void validate(const SynthConfig& c) {
  if (c.length < 1) throw DomainError("length must be >= 1");
  if (!(c.arrival_rate >= 0.0) || !std::isfinite(c.arrival_rate)) {
    throw DomainError("arrival_rate must be finite and >= 0");
  }
  if (c.duration_min < 1 || c.duration_max < c.duration_min) {
    throw DomainError("durations must satisfy 1 <= duration_min <= duration_max");
  }
  if (c.max_concurrent < 1) throw DomainError("max_concurrent must be >= 1");
  if (c.num_classes < 1) throw DomainError("num_classes must be >= 1");
  if (c.feature_dim < 1) throw DomainError("feature_dim must be >= 1");
  if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) {
    throw DomainError("noise_sigma must be finite and >= 0");
  }
}

namespace {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

}  // namespace

SynthStream generate_stream(const SynthConfig& config) {
  validate(config);
  const auto T = static_cast<std::size_t>(config.length);
  const std::size_t D = config.feature_dim;
  SynthStream out;

  auto sig_rng = substream(config.signature_seed.value_or(config.seed), 1);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  out.signatures = Matrix(static_cast<std::size_t>(config.num_classes), D);
  for (std::size_t c = 0; c < out.signatures.rows(); ++c) {
    auto row = out.signatures.row(c);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : row) {
        v = unit_normal(sig_rng);
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& v : row) v = static_cast<float>(v / norm);
  }

  auto arrival_rng = substream(config.seed, 2);
  std::poisson_distribution<int> arrivals(config.arrival_rate);
  std::uniform_int_distribution<std::int64_t> duration(config.duration_min, config.duration_max);
  std::uniform_int_distribution<int> klass(0, config.num_classes - 1);
  std::vector<std::int64_t> active_ends;
  for (std::int64_t t = 0; t < config.length; ++t) {
    std::erase_if(active_ends, [t](std::int64_t e) { return e < t; });
    const int n = config.arrival_rate > 0.0 ? arrivals(arrival_rng) : 0;
    for (int a = 0; a < n; ++a) {
      const std::int64_t end = std::min(t + duration(arrival_rng) - 1, config.length - 1);
      const int cls = klass(arrival_rng);
      if (!config.allow_overflow &&
          static_cast<int>(active_ends.size()) >= config.max_concurrent) {
        continue;
      }
      active_ends.push_back(end);
      out.instances.push_back({.start_frame = t, .end_frame = end, .class_id = cls});
    }
  }
  std::sort(out.instances.begin(), out.instances.end(), interval_less);

  out.features = Matrix(T, D);
  for (const auto& inst : out.instances) {
    const auto sig = out.signatures.row(static_cast<std::size_t>(*inst.class_id));
    for (std::int64_t t = inst.start_frame; t <= inst.end_frame; ++t) {
      auto row = out.features.row(static_cast<std::size_t>(t));
      for (std::size_t d = 0; d < D; ++d) row[d] += sig[d];
    }
  }
  auto noise_rng = substream(config.seed, 3);
  std::normal_distribution<double> noise(0.0, config.noise_sigma > 0.0 ? config.noise_sigma : 1.0);
  for (double& v : out.features.values()) {
    const double eps = config.noise_sigma > 0.0 ? noise(noise_rng) : 0.0;
    v = static_cast<float>(v + eps);
  }
  return out;
}

namespace {

std::vector<int> coverage(const std::vector<ActionInterval>& instances, std::int64_t length) {
  std::vector<int> count(static_cast<std::size_t>(std::max<std::int64_t>(length, 0)), 0);
  for (const auto& inst : instances) {
    for (std::int64_t t = std::max<std::int64_t>(inst.start_frame, 0);
         t <= std::min(inst.end_frame, length - 1); ++t) {
      ++count[static_cast<std::size_t>(t)];
    }
  }
  return count;
}

}  // namespace

double overlap_fraction(const std::vector<ActionInterval>& instances, std::int64_t length) {
  std::size_t covered = 0, overlapped = 0;
  for (int c : coverage(instances, length)) {
    covered += c >= 1;
    overlapped += c >= 2;
  }
  return covered ? static_cast<double>(overlapped) / static_cast<double>(covered) : 0.0;
}

double mean_concurrency(const std::vector<ActionInterval>& instances, std::int64_t length) {
  const auto cov = coverage(instances, length);
  if (cov.empty()) return 0.0;
  double sum = 0.0;
  for (int c : cov) sum += c;
  return sum / static_cast<double>(cov.size());
}

int max_concurrency(const std::vector<ActionInterval>& instances, std::int64_t length) {
  const auto cov = coverage(instances, length);
  return cov.empty() ? 0 : *std::max_element(cov.begin(), cov.end());
}

void save_features(const std::filesystem::path& path, const Matrix& features) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  binary::put_magic(os, "ASWF");
  binary::put_le<std::uint32_t>(os, kFeatureFileVersion);
  binary::put_le<std::uint64_t>(os, features.rows());
  binary::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(features.cols()));
  for (double v : features.values()) binary::put_f32(os, static_cast<float>(v));
  if (!os) throw FormatError("write failed for " + path.string());
}

Matrix load_features(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  binary::expect_magic(is, "ASWF");
  const auto version = binary::get_le<std::uint32_t>(is, "version");
  if (version != kFeatureFileVersion) {
    throw FormatError("unsupported feature file version " + std::to_string(version));
  }
  const auto T = binary::get_le<std::uint64_t>(is, "T");
  const auto D = binary::get_le<std::uint32_t>(is, "D");
  if (D == 0) throw FormatError("feature dimension is zero");
  Matrix m(static_cast<std::size_t>(T), D);
  for (double& v : m.values()) {
    v = binary::get_f32(is, "features");
    if (!std::isfinite(v)) throw FormatError("non-finite feature value");
  }
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in feature file");
  return m;
}

}  // namespace actionswitch
