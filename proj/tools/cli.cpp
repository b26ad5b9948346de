#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "actionswitch/errors.hpp"
#include "actionswitch/experiment.hpp"
#include "actionswitch/frame_scorer.hpp"
#include "actionswitch/io.hpp"
#include "actionswitch/metrics.hpp"
#include "actionswitch/synthgen.hpp"
#include "actionswitch/trainer.hpp"

#ifndef ACTIONSWITCH_VERSION
#define ACTIONSWITCH_VERSION "unknown"
#endif

namespace actionswitch::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Everything a rerun needs. No timestamps or host details, so identical
// invocations produce identical manifests.
struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  ordered_json config = ordered_json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  os << content;
  if (!os) throw FormatError("write failed for " + path);
}

void write_manifest(const Manifest& m) {
  if (m.outputs.empty() || m.outputs.front() == "-") return;
  ordered_json j;
  j["command"] = m.command;
  j["version"] = ACTIONSWITCH_VERSION;
  j["seed"] = m.seed;
  j["config"] = m.config;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  write_file(m.outputs.front() + ".manifest.json", j.dump(2) + "\n");
}

std::string video_id_of(const std::string& features_path) { return fs::path(features_path).stem().string(); }

std::vector<Video> load_videos(const std::vector<std::string>& feature_paths, const io::InstanceTable* gts) {
  std::vector<Video> out;
  for (const auto& p : feature_paths) {
    Video v{video_id_of(p), load_features(p), {}};
    if (gts) {
      auto it = gts->find(v.id);
      if (it == gts->end()) {
        spdlog::warn("no ground truth for video '{}'; treating it as empty", v.id);
      } else {
        v.instances = it->second;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

int switches_for_states(std::size_t num_states) {
  int k = 0;
  while ((std::size_t{1} << k) < num_states) ++k;
  if ((std::size_t{1} << k) != num_states || k < 1) {
    throw FormatError("checkpoint has " + std::to_string(num_states) + " states, not a power of two >= 2");
  }
  return k;
}

std::string key(double v) { return io::format_double(v); }

// gen

struct GenOptions {
  std::string features, gts, video_id;
  SynthConfig synth;
  std::int64_t signature_seed = -1;
};

void run_gen(GenOptions o, std::uint64_t seed) {
  o.synth.seed = seed;
  if (o.signature_seed >= 0) o.synth.signature_seed = static_cast<std::uint64_t>(o.signature_seed);
  const std::string id = o.video_id.empty() ? video_id_of(o.features) : o.video_id;
  const auto stream = generate_stream(o.synth);
  save_features(o.features, stream.features);
  io::InstanceTable table;
  table[id] = stream.instances;
  std::ostringstream os;
  io::write_instances(os, table);
  write_file(o.gts, os.str());

  Manifest m{"gen", seed};
  const auto& s = o.synth;
  m.config = {{"video_id", id},
              {"length", s.length},
              {"arrival_rate", s.arrival_rate},
              {"duration_min", s.duration_min},
              {"duration_max", s.duration_max},
              {"max_concurrent", s.max_concurrent},
              {"num_classes", s.num_classes},
              {"feature_dim", s.feature_dim},
              {"noise_sigma", s.noise_sigma},
              {"signature_seed", s.signature_seed.value_or(seed)},
              {"allow_overflow", s.allow_overflow},
              {"num_instances", stream.instances.size()},
              {"overlap_fraction", overlap_fraction(stream.instances, s.length)}};
  m.outputs = {o.features, o.gts};
  write_manifest(m);
}

// encode

struct EncodeOptions {
  std::string gts, out, report;
  std::vector<std::string> features;
  std::int64_t length = 0;
  int num_switches = 2;
  std::string policy = "drop-newest";
};

void run_encode(const EncodeOptions& o, std::uint64_t seed) {
  const auto table = io::read_instances(o.gts);
  const SwitchConfig cfg(o.num_switches);
  const auto policy = o.policy == "strict" ? ConflictPolicy::kStrict : ConflictPolicy::kDropNewest;

  std::map<std::string, std::int64_t> lengths;
  if (!o.features.empty()) {
    for (const auto& p : o.features) lengths[video_id_of(p)] = static_cast<std::int64_t>(load_features(p).rows());
  } else {
    if (o.length < 1) throw DomainError("encode needs --length or --features");
    for (const auto& [id, list] : table) lengths[id] = o.length;
  }

  std::vector<io::StateRecord> records;
  ordered_json report;
  report["num_switches"] = o.num_switches;
  report["policy"] = o.policy;
  report["videos"] = ordered_json::object();
  for (const auto& [id, T] : lengths) {
    auto it = table.find(id);
    const std::vector<ActionInterval> empty;
    const auto& instances = it == table.end() ? empty : it->second;
    auto enc = encode_instances(instances, T, cfg, policy);
    ordered_json v;
    v["num_instances"] = instances.size();
    v["dropped_indices"] = enc.report.dropped_indices;
    ordered_json assign = ordered_json::object();
    for (const auto& [idx, sw] : enc.report.switch_assignment) assign[std::to_string(idx)] = sw;
    v["switch_assignment"] = std::move(assign);
    v["warnings"] = enc.report.warnings;
    report["videos"][id] = std::move(v);
    for (const auto& w : enc.report.warnings) spdlog::warn("{}: {}", id, w);
    records.push_back({id, o.num_switches, std::move(enc.labels)});
  }
  std::ostringstream os;
  io::write_states(os, records);
  write_file(o.out, os.str());
  const std::string report_path = o.report.empty() ? o.out + ".report.json" : o.report;
  write_file(report_path, report.dump(2) + "\n");

  Manifest m{"encode", seed};
  m.config = {{"num_switches", o.num_switches}, {"policy", o.policy}, {"length", o.length}};
  m.inputs = {o.gts};
  m.inputs.insert(m.inputs.end(), o.features.begin(), o.features.end());
  m.outputs = {o.out, report_path};
  write_manifest(m);
}

// decode

struct DecodeOptions {
  std::string states, out = "-";
  int num_switches = 0;
  bool streaming = false;
};

void run_decode(const DecodeOptions& o, std::uint64_t seed) {
  const auto records = io::read_states(o.states);
  io::InstanceTable table;
  for (const auto& rec : records) {
    if (o.num_switches != 0 && o.num_switches != rec.num_switches) {
      throw DomainError("states for '" + rec.video_id + "' use " + std::to_string(rec.num_switches) +
                        " switches, --num-switches says " + std::to_string(o.num_switches));
    }
    const SwitchConfig cfg(rec.num_switches);
    auto& list = table[rec.video_id];
    auto decoded = o.streaming ? stream_decode(rec.labels, cfg) : decode_sequence(rec.labels, cfg);
    list.insert(list.end(), decoded.begin(), decoded.end());
  }
  std::ostringstream os;
  io::write_instances(os, table);
  write_file(o.out, os.str());

  Manifest m{"decode", seed};
  m.config = {{"num_switches", o.num_switches}, {"streaming", o.streaming}};
  m.inputs = {o.states};
  m.outputs = {o.out};
  write_manifest(m);
}

// train

struct TrainOptions {
  std::vector<std::string> features;
  std::string gts, out, history;
  TrainConfig train;
};

void run_train(TrainOptions o, std::uint64_t seed) {
  o.train.seed = seed;
  const auto gts = io::read_instances(o.gts);
  const auto videos = load_videos(o.features, &gts);
  const auto result = train(videos, o.train);
  save_checkpoint(o.out, result.params);
  std::ostringstream os;
  io::write_history(os, result.history);
  const std::string history_path = o.history.empty() ? o.out + ".history.jsonl" : o.history;
  write_file(history_path, os.str());

  Manifest m{"train", seed};
  const auto& c = o.train;
  m.config = {{"num_switches", c.num_switches}, {"alpha", c.alpha},
              {"epochs", c.epochs},             {"learning_rate", c.learning_rate},
              {"adam_beta1", c.adam_beta1},     {"adam_beta2", c.adam_beta2},
              {"adam_eps", c.adam_eps},         {"hidden_dim", c.hidden_dim},
              {"bptt_len", c.bptt_len},         {"dropped_instances", result.dropped_instances},
              {"merged_instances", result.merged_instances}};
  m.inputs = o.features;
  m.inputs.push_back(o.gts);
  m.outputs = {o.out, history_path};
  write_manifest(m);
}

// infer

struct InferOptions {
  std::string checkpoint, out = "-";
  std::vector<std::string> features;
  int num_switches = 0;
};

void run_infer(const InferOptions& o, std::uint64_t seed) {
  const auto params = load_checkpoint(o.checkpoint);
  const int k = o.num_switches ? o.num_switches : switches_for_states(params.dims().num_states);
  const SwitchConfig cfg(k);
  io::InstanceTable table;
  for (const auto& v : load_videos(o.features, nullptr)) {
    table[v.id] = infer_instances(params, v.features.view(), cfg);
  }
  std::ostringstream os;
  io::write_instances(os, table);
  write_file(o.out, os.str());

  Manifest m{"infer", seed};
  m.config = {{"num_switches", k}};
  m.inputs = {o.checkpoint};
  m.inputs.insert(m.inputs.end(), o.features.begin(), o.features.end());
  m.outputs = {o.out};
  write_manifest(m);
}

// eval

struct EvalOptions {
  std::string preds, gts, out = "-";
  double tiou = 0.5;
  std::vector<double> tious;
  double fps = 0.0;
  std::vector<double> offsets_sec{1.0, 2.0, 3.0};
  bool ignore_classes = false;
};

io::AlignedSets load_pair(const EvalOptions& o) {
  return io::align(io::read_instances(o.preds), io::read_instances(o.gts));
}

ordered_json f1_json(const MatchReport& r) {
  return {{"f1", r.f1},           {"precision", r.precision}, {"recall", r.recall},
          {"tp", r.tp},           {"num_pred", r.num_pred},   {"num_gt", r.num_gt},
          {"empty_convention", r.empty_convention}};
}

void run_eval_f1(const EvalOptions& o, std::uint64_t seed) {
  const auto sets = load_pair(o);
  ordered_json rep = f1_json(f1_at_tiou(sets.preds, sets.gts, o.tiou));
  rep["tiou"] = o.tiou;
  ordered_json per = ordered_json::object();
  for (double t : o.tious) per[key(t)] = f1_json(f1_at_tiou(sets.preds, sets.gts, t));
  rep["per_tiou"] = std::move(per);
  write_file(o.out, rep.dump(2) + "\n");

  Manifest m{"eval-f1", seed};
  m.config = {{"tiou", o.tiou}, {"per_tiou", o.tious}};
  m.inputs = {o.preds, o.gts};
  m.outputs = {o.out};
  write_manifest(m);
}

void run_eval_map(const EvalOptions& o, std::uint64_t seed) {
  const auto sets = load_pair(o);
  const auto r = interval_map(sets.preds, sets.gts, o.tious);
  ordered_json rep;
  ordered_json per = ordered_json::object(), per_class = ordered_json::object();
  for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
    per[key(r.thresholds[i])] = r.map_per_threshold[i];
    ordered_json classes = ordered_json::object();
    for (const auto& [c, ap] : r.ap_per_class[i]) classes[std::to_string(c)] = ap;
    per_class[key(r.thresholds[i])] = std::move(classes);
  }
  rep["average_map"] = r.average_map;
  rep["map_per_tiou"] = std::move(per);
  rep["ap_per_class"] = std::move(per_class);
  write_file(o.out, rep.dump(2) + "\n");

  Manifest m{"eval-map", seed};
  m.config = {{"tious", o.tious}};
  m.inputs = {o.preds, o.gts};
  m.outputs = {o.out};
  write_manifest(m);
}

void run_eval_odas(const EvalOptions& o, std::uint64_t seed) {
  auto sets = load_pair(o);
  if (o.ignore_classes) {
    for (auto* vs : {&sets.preds, &sets.gts}) {
      for (auto& list : *vs) {
        for (auto& inst : list) inst.class_id.reset();
      }
    }
  }
  std::vector<std::int64_t> frames;
  for (double s : o.offsets_sec) {
    const auto f = static_cast<std::int64_t>(std::llround(s * o.fps));
    if (f < 1) throw DomainError("offset " + key(s) + " s at " + key(o.fps) + " fps is under one frame");
    frames.push_back(f);
  }
  const auto r = point_map(sets.preds, sets.gts, frames);
  ordered_json rep;
  ordered_json per = ordered_json::object();
  for (std::size_t i = 0; i < frames.size(); ++i) per[key(o.offsets_sec[i])] = r.ap_per_offset[i];
  rep["p_map"] = r.mean_ap;
  rep["p_ap"] = std::move(per);
  rep["offset_frames"] = frames;
  rep["classwise"] = r.classwise;
  write_file(o.out, rep.dump(2) + "\n");

  Manifest m{"eval-odas", seed};
  m.config = {{"fps", o.fps}, {"offsets_seconds", o.offsets_sec}, {"ignore_classes", o.ignore_classes}};
  m.inputs = {o.preds, o.gts};
  m.outputs = {o.out};
  write_manifest(m);
}

// sweep

struct SweepOptions {
  std::vector<double> alphas{0.0, 0.01, 0.025, 0.05};
  std::vector<int> switches{2};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  unsigned jobs = 1;
  std::string out = "-";
  SynthConfig synth{.arrival_rate = 0.025};
  std::int64_t train_frames = 20000;
  std::int64_t eval_frames = 10000;
  std::int64_t video_length = 2000;
  double tiou = 0.5;
  TrainConfig train;
};

void run_sweep(SweepOptions o, std::uint64_t seed) {
  o.synth.seed = seed;
  const auto split = make_synthetic_split(o.synth, o.train_frames, o.eval_frames, o.video_length, seed);
  spdlog::info("synthetic split: {} train / {} eval videos, overlap fraction {:.3f}", split.train.size(),
               split.eval.size(), split.train_overlap);
  SweepSpec spec{o.alphas, o.switches, o.seeds, o.train, o.tiou, o.jobs};
  const auto result = sweep_alpha(split.train, split.eval, spec);
  auto rows = result.per_seed;
  rows.insert(rows.end(), result.median.begin(), result.median.end());
  std::ostringstream os;
  io::write_sweep_csv(os, rows);
  write_file(o.out, os.str());

  Manifest m{"sweep", seed};
  const auto& s = o.synth;
  const auto& c = o.train;
  m.config = {{"alphas", o.alphas},
              {"switches", o.switches},
              {"train_seeds", o.seeds},
              {"tiou", o.tiou},
              {"train_frames", o.train_frames},
              {"eval_frames", o.eval_frames},
              {"video_length", o.video_length},
              {"arrival_rate", s.arrival_rate},
              {"duration_min", s.duration_min},
              {"duration_max", s.duration_max},
              {"max_concurrent", s.max_concurrent},
              {"num_classes", s.num_classes},
              {"feature_dim", s.feature_dim},
              {"noise_sigma", s.noise_sigma},
              {"train_overlap_fraction", split.train_overlap},
              {"epochs", c.epochs},
              {"learning_rate", c.learning_rate},
              {"hidden_dim", c.hidden_dim},
              {"bptt_len", c.bptt_len}};
  m.outputs = {o.out};
  write_manifest(m);
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("actionswitch");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("ASW_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  if (!spdlog::get("actionswitch")) setup_logging();

  CLI::App app{"Online action localization with switch-state decoding", "actionswitch"};
  app.set_version_flag("--version", ACTIONSWITCH_VERSION);
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  auto add_seed = [&seed](CLI::App* sub) {
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
  };

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic feature stream and its ground truth");
  gen_cmd->add_option("--features", gen.features, "Output feature file (ASWF)")->required();
  gen_cmd->add_option("--gts", gen.gts, "Output ground-truth instances (JSON Lines)")->required();
  gen_cmd->add_option("--video-id", gen.video_id, "Video id (default: feature file stem)");
  gen_cmd->add_option("--length", gen.synth.length, "Frames")->capture_default_str();
  gen_cmd->add_option("--rate", gen.synth.arrival_rate, "Expected instance starts per frame")->capture_default_str();
  gen_cmd->add_option("--duration-min", gen.synth.duration_min)->capture_default_str();
  gen_cmd->add_option("--duration-max", gen.synth.duration_max)->capture_default_str();
  gen_cmd->add_option("--max-concurrent", gen.synth.max_concurrent)->capture_default_str();
  gen_cmd->add_option("--classes", gen.synth.num_classes)->capture_default_str();
  gen_cmd->add_option("--feature-dim", gen.synth.feature_dim)->capture_default_str();
  gen_cmd->add_option("--noise", gen.synth.noise_sigma, "Feature noise sigma")->capture_default_str();
  gen_cmd->add_option("--signature-seed", gen.signature_seed, "Seed for class signatures (default: --seed)");
  gen_cmd->add_flag("--allow-overflow", gen.synth.allow_overflow, "Keep arrivals beyond --max-concurrent");
  add_seed(gen_cmd);

  EncodeOptions enc;
  auto* enc_cmd = app.add_subcommand("encode", "Encode ground-truth instances into switch states");
  enc_cmd->add_option("--gts", enc.gts, "Instances (JSON Lines)")->required();
  enc_cmd->add_option("--num-switches", enc.num_switches)->capture_default_str();
  auto* len_opt = enc_cmd->add_option("--length", enc.length, "Frames per video");
  enc_cmd->add_option("--features", enc.features, "Feature files giving each video's length")->excludes(len_opt);
  enc_cmd->add_option("--policy", enc.policy, "Capacity conflicts: drop-newest or strict")
      ->check(CLI::IsMember({"drop-newest", "strict"}))
      ->capture_default_str();
  enc_cmd->add_option("--out", enc.out, "Output states (JSON Lines)")->required();
  enc_cmd->add_option("--report", enc.report, "Encode report (default: <out>.report.json)");
  add_seed(enc_cmd);

  DecodeOptions dec;
  auto* dec_cmd = app.add_subcommand("decode", "Decode switch states into instances");
  dec_cmd->add_option("--states", dec.states, "State sequences (JSON or JSON Lines)")->required();
  dec_cmd->add_option("--num-switches", dec.num_switches, "Expected switch count (checked against the file)");
  dec_cmd->add_flag("--streaming", dec.streaming, "Decode frame by frame");
  dec_cmd->add_option("--out", dec.out, "Output instances, - for stdout")->capture_default_str();
  add_seed(dec_cmd);

  TrainOptions tr;
  auto* tr_cmd = app.add_subcommand("train", "Train the frame scorer");
  tr_cmd->add_option("--features", tr.features, "Feature files; video id = file stem")->required();
  tr_cmd->add_option("--gts", tr.gts, "Ground-truth instances (JSON Lines)")->required();
  tr_cmd->add_option("--out", tr.out, "Output checkpoint (ASWP)")->required();
  tr_cmd->add_option("--history", tr.history, "Per-epoch history (default: <out>.history.jsonl)");
  tr_cmd->add_option("--num-switches", tr.train.num_switches)->capture_default_str();
  tr_cmd->add_option("--alpha", tr.train.alpha, "Conservativeness weight")->capture_default_str();
  tr_cmd->add_option("--epochs", tr.train.epochs)->capture_default_str();
  tr_cmd->add_option("--lr", tr.train.learning_rate)->capture_default_str();
  tr_cmd->add_option("--hidden", tr.train.hidden_dim)->capture_default_str();
  tr_cmd->add_option("--bptt", tr.train.bptt_len, "Truncated BPTT window")->capture_default_str();
  add_seed(tr_cmd);

  InferOptions inf;
  auto* inf_cmd = app.add_subcommand("infer", "Run a checkpoint online and emit instances");
  inf_cmd->add_option("--checkpoint", inf.checkpoint)->required();
  inf_cmd->add_option("--features", inf.features, "Feature files; video id = file stem")->required();
  inf_cmd->add_option("--num-switches", inf.num_switches, "Default: from the checkpoint");
  inf_cmd->add_option("--out", inf.out, "Output instances, - for stdout")->capture_default_str();
  add_seed(inf_cmd);

  EvalOptions f1o;
  f1o.tious = {0.3, 0.4, 0.5, 0.6, 0.7};
  auto* f1_cmd = app.add_subcommand("eval-f1", "Hungarian-matched F1");
  f1_cmd->add_option("--preds", f1o.preds)->required();
  f1_cmd->add_option("--gts", f1o.gts)->required();
  f1_cmd->add_option("--tiou", f1o.tiou)->capture_default_str();
  f1_cmd->add_option("--per-tiou", f1o.tious, "Extra thresholds to report")->delimiter(',')->capture_default_str();
  f1_cmd->add_option("--out", f1o.out)->capture_default_str();
  add_seed(f1_cmd);

  EvalOptions mapo;
  mapo.tious = {0.3, 0.4, 0.5, 0.6, 0.7};
  auto* map_cmd = app.add_subcommand("eval-map", "Interval mAP over tIoU thresholds");
  map_cmd->add_option("--preds", mapo.preds)->required();
  map_cmd->add_option("--gts", mapo.gts)->required();
  map_cmd->add_option("--tious", mapo.tious)->delimiter(',')->capture_default_str();
  map_cmd->add_option("--out", mapo.out)->capture_default_str();
  add_seed(map_cmd);

  EvalOptions odas;
  auto* odas_cmd = app.add_subcommand("eval-odas", "Point-level mAP on action starts");
  odas_cmd->add_option("--preds", odas.preds)->required();
  odas_cmd->add_option("--gts", odas.gts)->required();
  odas_cmd->add_option("--fps", odas.fps, "Frames per second")->required()->check(CLI::PositiveNumber);
  odas_cmd->add_option("--offsets", odas.offsets_sec, "Offsets in seconds")->delimiter(',')->capture_default_str();
  odas_cmd->add_flag("--ignore-classes", odas.ignore_classes, "Pool all classes");
  odas_cmd->add_option("--out", odas.out)->capture_default_str();
  add_seed(odas_cmd);

  SweepOptions sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Alpha / switch-count sweep on synthetic data");
  sw_cmd->add_option("--alphas", sw.alphas)->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--switches", sw.switches)->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--seeds", sw.seeds, "Training seeds")->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--jobs", sw.jobs)->capture_default_str();
  sw_cmd->add_option("--out", sw.out, "Output CSV, - for stdout")->capture_default_str();
  sw_cmd->add_option("--train-frames", sw.train_frames)->capture_default_str();
  sw_cmd->add_option("--eval-frames", sw.eval_frames)->capture_default_str();
  sw_cmd->add_option("--video-length", sw.video_length)->capture_default_str();
  sw_cmd->add_option("--rate", sw.synth.arrival_rate)->capture_default_str();
  sw_cmd->add_option("--max-concurrent", sw.synth.max_concurrent)->capture_default_str();
  sw_cmd->add_option("--noise", sw.synth.noise_sigma)->capture_default_str();
  sw_cmd->add_option("--feature-dim", sw.synth.feature_dim)->capture_default_str();
  sw_cmd->add_option("--tiou", sw.tiou)->capture_default_str();
  sw_cmd->add_option("--epochs", sw.train.epochs)->capture_default_str();
  sw_cmd->add_option("--lr", sw.train.learning_rate)->capture_default_str();
  sw_cmd->add_option("--hidden", sw.train.hidden_dim)->capture_default_str();
  add_seed(sw_cmd);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) run_gen(gen, seed);
    else if (enc_cmd->parsed()) run_encode(enc, seed);
    else if (dec_cmd->parsed()) run_decode(dec, seed);
    else if (tr_cmd->parsed()) run_train(tr, seed);
    else if (inf_cmd->parsed()) run_infer(inf, seed);
    else if (f1_cmd->parsed()) run_eval_f1(f1o, seed);
    else if (map_cmd->parsed()) run_eval_map(mapo, seed);
    else if (odas_cmd->parsed()) run_eval_odas(odas, seed);
    else if (sw_cmd->parsed()) run_sweep(sw, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace actionswitch::cli
