#pragma once

// Text formats: instance JSON Lines, state-sequence JSON, logit CSV, sweep CSV,
// training-history JSON Lines.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "actionswitch/conservativeness.hpp"
#include "actionswitch/metrics.hpp"
#include "actionswitch/switchboard.hpp"
#include "actionswitch/trainer.hpp"

namespace actionswitch::io {

// video_id -> instances, in file order per video.
using InstanceTable = std::map<std::string, std::vector<ActionInterval>>;

InstanceTable read_instances(std::istream& is);
InstanceTable read_instances(const std::filesystem::path& path);
// One object per instance, videos in id order, instances in the given order.
void write_instances(std::ostream& os, const InstanceTable& table);

// Aligns two tables over the union of their video ids (sorted).
struct AlignedSets {
  std::vector<std::string> video_ids;
  VideoSet preds;
  VideoSet gts;
};
AlignedSets align(const InstanceTable& preds, const InstanceTable& gts);

struct StateRecord {
  std::string video_id;
  int num_switches = 1;
  StateSequence labels;
};

// A single JSON object, or JSON Lines of objects.
std::vector<StateRecord> read_states(std::istream& is);
std::vector<StateRecord> read_states(const std::filesystem::path& path);
void write_states(std::ostream& os, const std::vector<StateRecord>& records);

LogitSequence read_logits_csv(std::istream& is);
void write_logits_csv(std::ostream& os, const LogitSequence& logits);

inline constexpr const char* kSweepHeader =
    "num_switches,alpha,f1,precision,recall,num_proposals,num_gt,seed";
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

void write_history(std::ostream& os, const std::vector<EpochStats>& history);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace actionswitch::io
