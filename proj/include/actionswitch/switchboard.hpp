#pragma once

// Switch/state algebra, ground-truth encoding and state decoding.
//
// k switches give 2^k states. Switch j (1-based) has id 2^(j-1); a state label
// is the sum of the ids of the active switches, i.e. a bitmask. Intervals use
// inclusive frame indices.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace actionswitch {

inline constexpr int kMaxSwitches = 16;

class SwitchConfig {
 public:
  // Throws DomainError outside [1, kMaxSwitches].
  explicit SwitchConfig(int num_switches);

  int num_switches() const { return num_switches_; }
  int num_states() const { return 1 << num_switches_; }

  bool operator==(const SwitchConfig&) const = default;

 private:
  int num_switches_;
};

class StateLabel {
 public:
  constexpr StateLabel() = default;
  constexpr explicit StateLabel(std::uint32_t value) : value_(value) {}

  constexpr std::uint32_t value() const { return value_; }
  constexpr bool switch_on(int switch_index) const {
    return (value_ >> (switch_index - 1)) & 1u;
  }
  bool valid_for(const SwitchConfig& config) const {
    return value_ < static_cast<std::uint32_t>(config.num_states());
  }

  constexpr auto operator<=>(const StateLabel&) const = default;

 private:
  std::uint32_t value_ = 0;
};

using StateSequence = std::vector<StateLabel>;

// Converts raw integers, validating each against the config.
StateSequence make_state_sequence(std::span<const std::int64_t> raw, const SwitchConfig& config);

struct ActionInterval {
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;  // inclusive
  std::optional<int> class_id;
  std::optional<double> score;
  bool truncated = false;

  std::int64_t length() const { return end_frame - start_frame + 1; }

  bool operator==(const ActionInterval&) const = default;
};

// Orders by (start_frame, end_frame); remaining fields break ties so sorting
// is total and deterministic.
bool interval_less(const ActionInterval& a, const ActionInterval& b);

void validate_interval(const ActionInterval& interval);

// 1-based indices of the switches active in `state`, ascending.
std::vector<int> active_switches(StateLabel state, const SwitchConfig& config);

enum class ConflictPolicy { kDropNewest, kStrict };

struct EncodeReport {
  std::vector<ActionInterval> dropped_instances;
  std::vector<std::size_t> dropped_indices;  // positions in the caller's input
  std::map<std::size_t, int> switch_assignment;  // input index -> 1-based switch
  // Back-to-back instances forced onto the same switch; they decode as one.
  std::vector<std::string> warnings;
};

struct EncodeResult {
  StateSequence labels;
  EncodeReport report;
};

// Instances are assigned in (start, end) order to the lowest free switch,
// skipping a switch that was busy on the previous frame when another free one
// exists. Overflow is dropped (kDropNewest) or raises CapacityError (kStrict).
EncodeResult encode_instances(std::span<const ActionInterval> instances, std::int64_t length,
                              const SwitchConfig& config,
                              ConflictPolicy policy = ConflictPolicy::kDropNewest);

// Per-switch maximal runs become intervals, sorted by interval_less. Runs that
// reach the last frame are flagged truncated.
std::vector<ActionInterval> decode_sequence(std::span<const StateLabel> states,
                                            const SwitchConfig& config);

// Online counterpart of decode_sequence. One instance per stream; feed frames
// 0, 1, 2, ... in order and call finalize() once at the end.
class StreamDecoder {
 public:
  explicit StreamDecoder(const SwitchConfig& config);

  // Instances whose switch turned off at `frame` (end = frame - 1), in switch order.
  std::vector<ActionInterval> step(StateLabel state, std::int64_t frame);

  // Instances still open, truncated, end = last frame seen. Idempotent after the first call.
  std::vector<ActionInterval> finalize();

  std::int64_t frames_seen() const { return next_frame_; }
  StateLabel previous_state() const { return previous_; }

 private:
  SwitchConfig config_;
  StateLabel previous_{0};
  std::int64_t next_frame_ = 0;
  std::vector<std::int64_t> open_start_;  // per switch, -1 when idle
  bool finalized_ = false;
};

// Runs a whole sequence through StreamDecoder and sorts with interval_less.
std::vector<ActionInterval> stream_decode(std::span<const StateLabel> states,
                                          const SwitchConfig& config);

}  // namespace actionswitch
