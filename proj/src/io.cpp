#include "actionswitch/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "actionswitch/errors.hpp"

namespace actionswitch::io {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  return is;
}

std::int64_t get_int(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key) || !obj[key].is_number_integer()) {
    throw FormatError("line " + std::to_string(line) + ": \"" + key + "\" must be an integer");
  }
  return obj[key].get<std::int64_t>();
}

json parse_line(const std::string& text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("line " + std::to_string(line) + ": " + e.what());
  }
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

InstanceTable read_instances(std::istream& is) {
  InstanceTable table;
  std::string text;
  std::size_t line = 0;
  while (std::getline(is, text)) {
    ++line;
    if (blank(text)) continue;
    const json obj = parse_line(text, line);
    if (!obj.is_object()) throw FormatError("line " + std::to_string(line) + ": expected an object");
    if (!obj.contains("video_id") || !obj["video_id"].is_string()) {
      throw FormatError("line " + std::to_string(line) + ": \"video_id\" must be a string");
    }
    ActionInterval inst;
    inst.start_frame = get_int(obj, "start", line);
    inst.end_frame = get_int(obj, "end", line);
    if (obj.contains("class_id") && !obj["class_id"].is_null()) {
      if (!obj["class_id"].is_number_integer()) {
        throw FormatError("line " + std::to_string(line) + ": \"class_id\" must be int or null");
      }
      inst.class_id = obj["class_id"].get<int>();
    }
    if (obj.contains("score") && !obj["score"].is_null()) {
      if (!obj["score"].is_number()) {
        throw FormatError("line " + std::to_string(line) + ": \"score\" must be a number or null");
      }
      inst.score = obj["score"].get<double>();
    }
    if (obj.contains("truncated")) {
      if (!obj["truncated"].is_boolean()) {
        throw FormatError("line " + std::to_string(line) + ": \"truncated\" must be a bool");
      }
      inst.truncated = obj["truncated"].get<bool>();
    }
    try {
      validate_interval(inst);
    } catch (const DomainError& e) {
      throw FormatError("line " + std::to_string(line) + ": " + e.what());
    }
    table[obj["video_id"].get<std::string>()].push_back(inst);
  }
  return table;
}

InstanceTable read_instances(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_instances(is);
}

void write_instances(std::ostream& os, const InstanceTable& table) {
  for (const auto& [vid, list] : table) {
    for (const auto& inst : list) {
      ordered_json obj;
      obj["video_id"] = vid;
      obj["start"] = inst.start_frame;
      obj["end"] = inst.end_frame;
      obj["class_id"] = inst.class_id ? ordered_json(*inst.class_id) : ordered_json(nullptr);
      obj["score"] = inst.score ? ordered_json(*inst.score) : ordered_json(nullptr);
      obj["truncated"] = inst.truncated;
      os << obj.dump() << '\n';
    }
  }
}

AlignedSets align(const InstanceTable& preds, const InstanceTable& gts) {
  std::set<std::string> ids;
  for (const auto& [k, v] : preds) ids.insert(k);
  for (const auto& [k, v] : gts) ids.insert(k);
  AlignedSets out;
  for (const auto& id : ids) {
    out.video_ids.push_back(id);
    auto p = preds.find(id);
    auto g = gts.find(id);
    out.preds.push_back(p == preds.end() ? std::vector<ActionInterval>{} : p->second);
    out.gts.push_back(g == gts.end() ? std::vector<ActionInterval>{} : g->second);
  }
  return out;
}

namespace {

StateRecord parse_state_record(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw FormatError("line " + std::to_string(line) + ": expected an object");
  StateRecord rec;
  if (obj.contains("video_id")) {
    if (!obj["video_id"].is_string()) throw FormatError("\"video_id\" must be a string");
    rec.video_id = obj["video_id"].get<std::string>();
  }
  rec.num_switches = static_cast<int>(get_int(obj, "num_switches", line));
  if (!obj.contains("labels") || !obj["labels"].is_array()) {
    throw FormatError("line " + std::to_string(line) + ": \"labels\" must be an array");
  }
  std::vector<std::int64_t> raw;
  for (const auto& v : obj["labels"]) {
    if (!v.is_number_integer()) throw FormatError("line " + std::to_string(line) + ": labels must be integers");
    raw.push_back(v.get<std::int64_t>());
  }
  try {
    rec.labels = make_state_sequence(raw, SwitchConfig(rec.num_switches));
  } catch (const DomainError& e) {
    throw FormatError("line " + std::to_string(line) + ": " + e.what());
  }
  return rec;
}

}  // namespace

std::vector<StateRecord> read_states(std::istream& is) {
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string all = buf.str();
  std::vector<StateRecord> out;
  // whole-document object first (may be pretty-printed over several lines)
  try {
    const json doc = json::parse(all);
    if (doc.is_object()) {
      out.push_back(parse_state_record(doc, 1));
      return out;
    }
    if (doc.is_array()) {
      for (const auto& obj : doc) out.push_back(parse_state_record(obj, 1));
      return out;
    }
  } catch (const json::parse_error&) {
    // fall through to JSON Lines
  }
  std::istringstream lines(all);
  std::string text;
  std::size_t line = 0;
  while (std::getline(lines, text)) {
    ++line;
    if (blank(text)) continue;
    out.push_back(parse_state_record(parse_line(text, line), line));
  }
  return out;
}

std::vector<StateRecord> read_states(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_states(is);
}

void write_states(std::ostream& os, const std::vector<StateRecord>& records) {
  for (const auto& rec : records) {
    ordered_json obj;
    obj["video_id"] = rec.video_id;
    obj["num_switches"] = rec.num_switches;
    ordered_json labels = ordered_json::array();
    for (auto s : rec.labels) labels.push_back(s.value());
    obj["labels"] = std::move(labels);
    os << obj.dump() << '\n';
  }
}

LogitSequence read_logits_csv(std::istream& is) {
  std::vector<double> values;
  std::size_t cols = 0, rows = 0;
  std::string text;
  while (std::getline(is, text)) {
    if (blank(text)) continue;
    std::size_t n = 0;
    std::istringstream fields(text);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const auto b = field.find_first_not_of(" \t\r");
      const auto e = field.find_last_not_of(" \t\r");
      if (b == std::string::npos) throw FormatError("empty CSV field on row " + std::to_string(rows + 1));
      const std::string_view f(field.data() + b, e - b + 1);
      double v = 0.0;
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw FormatError("bad number \"" + std::string(f) + "\" on row " + std::to_string(rows + 1));
      }
      values.push_back(v);
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols) throw FormatError("ragged CSV at row " + std::to_string(rows + 1));
    ++rows;
  }
  LogitSequence m(rows, cols);
  m.values() = std::move(values);
  return m;
}

void write_logits_csv(std::ostream& os, const LogitSequence& logits) {
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    for (std::size_t s = 0; s < logits.cols(); ++s) {
      if (s) os << ',';
      os << format_double(logits(t, s));
    }
    os << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    auto metric = [&](double v) { return r.failed ? std::string("nan") : format_double(v); };
    os << r.num_switches << ',' << format_double(r.alpha) << ',' << metric(r.f1) << ','
       << metric(r.precision) << ',' << metric(r.recall) << ','
       << (r.failed ? std::string("nan") : std::to_string(r.num_proposals)) << ','
       << (r.failed ? std::string("nan") : std::to_string(r.num_gt)) << ',' << r.seed << '\n';
  }
}

void write_history(std::ostream& os, const std::vector<EpochStats>& history) {
  for (const auto& h : history) {
    ordered_json obj;
    obj["epoch"] = h.epoch;
    obj["total"] = h.total;
    obj["ce"] = h.ce;
    obj["cons"] = h.cons;
    obj["num_cc_positions"] = h.num_cc_positions;
    obj["num_windows"] = h.num_windows;
    obj["num_frames"] = h.num_frames;
    os << obj.dump() << '\n';
  }
}

}  // namespace actionswitch::io
