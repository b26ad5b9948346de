#include "actionswitch/switchboard.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "actionswitch/errors.hpp"

namespace actionswitch {

SwitchConfig::SwitchConfig(int num_switches) : num_switches_(num_switches) {
  if (num_switches < 1 || num_switches > kMaxSwitches) {
    throw DomainError("num_switches must be in [1, " + std::to_string(kMaxSwitches) +
                      "], got " + std::to_string(num_switches));
  }
}

StateSequence make_state_sequence(std::span<const std::int64_t> raw, const SwitchConfig& config) {
  StateSequence out;
  out.reserve(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t) {
    if (raw[t] < 0 || raw[t] >= config.num_states()) {
      throw DomainError("state label " + std::to_string(raw[t]) + " at frame " +
                        std::to_string(t) + " outside [0, " +
                        std::to_string(config.num_states()) + ")");
    }
    out.emplace_back(static_cast<std::uint32_t>(raw[t]));
  }
  return out;
}

bool interval_less(const ActionInterval& a, const ActionInterval& b) {
  if (a.start_frame != b.start_frame) return a.start_frame < b.start_frame;
  if (a.end_frame != b.end_frame) return a.end_frame < b.end_frame;
  if (a.truncated != b.truncated) return b.truncated;
  if (a.class_id != b.class_id) return a.class_id < b.class_id;
  return a.score < b.score;
}

void validate_interval(const ActionInterval& interval) {
  if (interval.start_frame < 0) {
    throw DomainError("negative start frame " + std::to_string(interval.start_frame));
  }
  if (interval.end_frame < interval.start_frame) {
    throw DomainError("inverted interval [" + std::to_string(interval.start_frame) + ", " +
                      std::to_string(interval.end_frame) + "]");
  }
}

namespace {

void check_state(StateLabel state, const SwitchConfig& config) {
  if (!state.valid_for(config)) {
    throw DomainError("state " + std::to_string(state.value()) + " invalid for " +
                      std::to_string(config.num_switches()) + " switch(es)");
  }
}

}  // namespace

std::vector<int> active_switches(StateLabel state, const SwitchConfig& config) {
  check_state(state, config);
  std::vector<int> out;
  for (int j = 1; j <= config.num_switches(); ++j) {
    if (state.switch_on(j)) out.push_back(j);
  }
  return out;
}

EncodeResult encode_instances(std::span<const ActionInterval> instances, std::int64_t length,
                              const SwitchConfig& config, ConflictPolicy policy) {
  if (length < 0) throw DomainError("negative sequence length");
  for (const auto& inst : instances) {
    validate_interval(inst);
    if (inst.end_frame >= length) {
      throw DomainError("interval end " + std::to_string(inst.end_frame) +
                        " outside sequence of length " + std::to_string(length));
    }
  }

  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = instances[a];
    const auto& y = instances[b];
    if (x.start_frame != y.start_frame) return x.start_frame < y.start_frame;
    return x.end_frame < y.end_frame;
  });

  const int k = config.num_switches();
  // Last frame covered by each switch's current occupant; -2 means never used,
  // so it is neither busy nor adjacent at frame 0.
  std::vector<std::int64_t> busy_until(static_cast<std::size_t>(k), -2);
  EncodeResult result;
  result.labels.assign(static_cast<std::size_t>(length), StateLabel{0});
  std::vector<std::uint32_t> bits(static_cast<std::size_t>(length), 0);

  for (std::size_t idx : order) {
    const auto& inst = instances[idx];
    const std::int64_t f = inst.start_frame;
    int chosen = -1;
    int fallback = -1;
    for (int j = 0; j < k; ++j) {
      const std::int64_t until = busy_until[static_cast<std::size_t>(j)];
      if (until >= f) continue;
      if (until == f - 1) {
        if (fallback < 0) fallback = j;
        continue;
      }
      chosen = j;
      break;
    }
    if (chosen < 0 && fallback >= 0) {
      chosen = fallback;
      std::ostringstream msg;
      msg << "instance " << idx << " [" << inst.start_frame << ", " << inst.end_frame
          << "] abuts the previous occupant of switch " << (chosen + 1)
          << "; they decode as one instance";
      result.report.warnings.push_back(msg.str());
    }
    if (chosen < 0) {
      if (policy == ConflictPolicy::kStrict) {
        throw CapacityError("instance " + std::to_string(idx) + " starting at frame " +
                            std::to_string(f) + " needs more than " + std::to_string(k) +
                            " switch(es)");
      }
      result.report.dropped_instances.push_back(inst);
      result.report.dropped_indices.push_back(idx);
      continue;
    }
    busy_until[static_cast<std::size_t>(chosen)] = inst.end_frame;
    result.report.switch_assignment[idx] = chosen + 1;
    const std::uint32_t id = 1u << chosen;
    for (std::int64_t t = inst.start_frame; t <= inst.end_frame; ++t) {
      bits[static_cast<std::size_t>(t)] |= id;
    }
  }

  for (std::size_t t = 0; t < bits.size(); ++t) result.labels[t] = StateLabel{bits[t]};
  // dropped_indices follow assignment order; report them by input position
  std::vector<std::size_t> perm(result.report.dropped_indices.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    return result.report.dropped_indices[a] < result.report.dropped_indices[b];
  });
  EncodeReport& rep = result.report;
  std::vector<std::size_t> idx_sorted;
  std::vector<ActionInterval> inst_sorted;
  for (std::size_t p : perm) {
    idx_sorted.push_back(rep.dropped_indices[p]);
    inst_sorted.push_back(rep.dropped_instances[p]);
  }
  rep.dropped_indices = std::move(idx_sorted);
  rep.dropped_instances = std::move(inst_sorted);
  return result;
}

std::vector<ActionInterval> decode_sequence(std::span<const StateLabel> states,
                                            const SwitchConfig& config) {
  for (StateLabel s : states) check_state(s, config);
  std::vector<ActionInterval> out;
  const auto n = static_cast<std::int64_t>(states.size());
  for (int j = 1; j <= config.num_switches(); ++j) {
    std::int64_t run_start = -1;
    for (std::int64_t t = 0; t < n; ++t) {
      const bool on = states[static_cast<std::size_t>(t)].switch_on(j);
      if (on && run_start < 0) {
        run_start = t;
      } else if (!on && run_start >= 0) {
        out.push_back({.start_frame = run_start, .end_frame = t - 1});
        run_start = -1;
      }
    }
    if (run_start >= 0) {
      out.push_back({.start_frame = run_start, .end_frame = n - 1, .truncated = true});
    }
  }
  std::sort(out.begin(), out.end(), interval_less);
  return out;
}

StreamDecoder::StreamDecoder(const SwitchConfig& config)
    : config_(config), open_start_(static_cast<std::size_t>(config.num_switches()), -1) {}

std::vector<ActionInterval> StreamDecoder::step(StateLabel state, std::int64_t frame) {
  if (finalized_) throw ProtocolError("step() after finalize()");
  if (frame != next_frame_) {
    throw ProtocolError("expected frame " + std::to_string(next_frame_) + ", got " +
                        std::to_string(frame));
  }
  check_state(state, config_);
  std::vector<ActionInterval> closed;
  const std::uint32_t changed = state.value() ^ previous_.value();
  if (changed != 0) {
    for (int j = 1; j <= config_.num_switches(); ++j) {
      if (!((changed >> (j - 1)) & 1u)) continue;
      auto& start = open_start_[static_cast<std::size_t>(j - 1)];
      if (state.switch_on(j)) {
        start = frame;
      } else {
        closed.push_back({.start_frame = start, .end_frame = frame - 1});
        start = -1;
      }
    }
  }
  previous_ = state;
  ++next_frame_;
  return closed;
}

std::vector<ActionInterval> StreamDecoder::finalize() {
  std::vector<ActionInterval> open;
  if (finalized_) return open;
  finalized_ = true;
  for (auto& start : open_start_) {
    if (start >= 0) {
      open.push_back({.start_frame = start, .end_frame = next_frame_ - 1, .truncated = true});
      start = -1;
    }
  }
  return open;
}

std::vector<ActionInterval> stream_decode(std::span<const StateLabel> states,
                                          const SwitchConfig& config) {
  StreamDecoder decoder(config);
  std::vector<ActionInterval> out;
  for (std::size_t t = 0; t < states.size(); ++t) {
    auto closed = decoder.step(states[t], static_cast<std::int64_t>(t));
    out.insert(out.end(), closed.begin(), closed.end());
  }
  auto open = decoder.finalize();
  out.insert(out.end(), open.begin(), open.end());
  std::sort(out.begin(), out.end(), interval_less);
  return out;
}

}  // namespace actionswitch
