#include "actionswitch/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <spdlog/spdlog.h>

#include "actionswitch/errors.hpp"

namespace actionswitch {

void validate(const TrainConfig& c) {
  if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) throw DomainError("alpha must be >= 0");
  if (!(c.learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
  if (!(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0) || !(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0)) {
    throw DomainError("Adam betas must be in [0, 1)");
  }
  if (!(c.adam_eps > 0.0)) throw DomainError("adam_eps must be > 0");
  if (c.epochs < 1) throw DomainError("epochs must be >= 1");
  if (c.bptt_len < 2) throw DomainError("bptt_len must be >= 2");
  if (c.hidden_dim < 1) throw DomainError("hidden_dim must be >= 1");
  SwitchConfig check(c.num_switches);
  (void)check;
}

Adam::Adam(std::size_t num_params, double lr, double beta1, double beta2, double eps)
    : m_(num_params, 0.0), v_(num_params, 0.0) {
  hyper_.lr = lr;
  hyper_.beta1 = beta1;
  hyper_.beta2 = beta2;
  hyper_.eps = eps;
}

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw DomainError("Adam parameter count mismatch");
  }
  ++t_;
  hyper_.bias1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t_));
  hyper_.bias2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t_));
  kernels::active().adam_update(hyper_, params, grads, m_, v_);
}

TrainResult train(std::span<const Video> dataset, const TrainConfig& config) {
  validate(config);
  if (dataset.empty()) throw DomainError("empty training set");
  const std::size_t D = dataset.front().features.cols();
  for (const auto& v : dataset) {
    if (v.features.cols() != D) throw DomainError("videos disagree on feature dimension");
    if (v.features.rows() == 0) throw DomainError("video '" + v.id + "' has no frames");
  }

  const SwitchConfig switches(config.num_switches);
  TrainResult result;
  std::vector<StateSequence> labels;
  labels.reserve(dataset.size());
  for (const auto& v : dataset) {
    auto enc = encode_instances(v.instances, static_cast<std::int64_t>(v.features.rows()), switches,
                                ConflictPolicy::kDropNewest);
    result.dropped_instances += enc.report.dropped_instances.size();
    result.merged_instances += enc.report.warnings.size();
    labels.push_back(std::move(enc.labels));
  }
  if (result.dropped_instances || result.merged_instances) {
    spdlog::info("GT encoding with {} switch(es): {} dropped, {} merged", config.num_switches,
                 result.dropped_instances, result.merged_instances);
  }

  result.params = init_params(D, config.hidden_dim, static_cast<std::size_t>(switches.num_states()),
                              config.seed);
  Adam adam(result.params.flat().size(), config.learning_rate, config.adam_beta1, config.adam_beta2,
            config.adam_eps);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochStats stats;
    stats.epoch = epoch;
    for (std::size_t vi = 0; vi < dataset.size(); ++vi) {
      const Matrix& feats = dataset[vi].features;
      const std::size_t T = feats.rows();
      ScorerState carry = ScorerState::zeros(config.hidden_dim);
      for (std::size_t w = 0; w < T; w += config.bptt_len) {
        const std::size_t len = std::min(config.bptt_len, T - w);
        const ConstMatrixRef window{feats.values().data() + w * D, len, D};
        auto fwd = forward_sequence(result.params, window, carry);
        const auto loss = sequence_loss_and_grad(
            fwd.logits, std::span<const StateLabel>(labels[vi]).subspan(w, len), config.alpha);
        const auto grads = backward_sequence(fwd.cache, loss.grad);
        carry = fwd.cache.final_state();
        adam.step(result.params.flat(), grads.flat());

        const auto n = static_cast<double>(len);
        stats.total += loss.total * n;
        stats.ce += loss.ce_part * n;
        stats.cons += loss.cons_part * n;
        stats.num_cc_positions += loss.num_cc_positions;
        stats.num_frames += len;
        ++stats.num_windows;
      }
    }
    const auto frames = static_cast<double>(stats.num_frames);
    stats.total /= frames;
    stats.ce /= frames;
    stats.cons /= frames;
    spdlog::debug("epoch {}: total {:.6f} ce {:.6f} cons {:.6f} cc {}", epoch, stats.total,
                  stats.ce, stats.cons, stats.num_cc_positions);
    result.history.push_back(stats);
  }
  return result;
}

StateSequence predict_states(const ScorerParams& params, ConstMatrixRef features) {
  if (features.cols != params.dims().feature_dim) {
    throw DomainError("feature dim " + std::to_string(features.cols) + " != scorer input dim " +
                      std::to_string(params.dims().feature_dim));
  }
  StateSequence out;
  out.reserve(features.rows);
  ScorerState state = ScorerState::zeros(params.dims().hidden_dim);
  std::vector<double> logits(params.dims().num_states);
  for (std::size_t t = 0; t < features.rows; ++t) {
    forward_step(params, state, features.row(t), logits);
    out.emplace_back(static_cast<std::uint32_t>(argmax(logits)));
  }
  return out;
}

std::vector<ActionInterval> infer_instances(const ScorerParams& params, ConstMatrixRef features,
                                            const SwitchConfig& config) {
  if (params.dims().num_states != static_cast<std::size_t>(config.num_states())) {
    throw DomainError("scorer emits " + std::to_string(params.dims().num_states) +
                      " states but the switch config has " + std::to_string(config.num_states()));
  }
  if (features.cols != params.dims().feature_dim) {
    throw DomainError("feature dim " + std::to_string(features.cols) + " != scorer input dim " +
                      std::to_string(params.dims().feature_dim));
  }
  StreamDecoder decoder(config);
  ScorerState state = ScorerState::zeros(params.dims().hidden_dim);
  std::vector<double> logits(params.dims().num_states);
  std::vector<ActionInterval> out;
  // confidence_sum[t] = sum of the winning state's probability over frames < t
  std::vector<double> confidence_sum(features.rows + 1, 0.0);
  for (std::size_t t = 0; t < features.rows; ++t) {
    forward_step(params, state, features.row(t), logits);
    const std::size_t best = argmax(logits);
    confidence_sum[t + 1] = confidence_sum[t] + std::exp(logits[best] - log_sum_exp(logits));
    auto closed = decoder.step(StateLabel(static_cast<std::uint32_t>(best)), static_cast<std::int64_t>(t));
    out.insert(out.end(), closed.begin(), closed.end());
  }
  auto open = decoder.finalize();
  out.insert(out.end(), open.begin(), open.end());
  for (auto& inst : out) {
    const auto s = static_cast<std::size_t>(inst.start_frame);
    const auto e = static_cast<std::size_t>(inst.end_frame) + 1;
    inst.score = (confidence_sum[e] - confidence_sum[s]) / static_cast<double>(e - s);
  }
  std::sort(out.begin(), out.end(), interval_less);
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

SweepRow run_cell(std::span<const Video> train_set, std::span<const Video> eval_set,
                  const SweepSpec& spec, int k, double alpha, std::uint64_t seed) {
  SweepRow row;
  row.num_switches = k;
  row.alpha = alpha;
  row.seed = static_cast<std::int64_t>(seed);
  try {
    TrainConfig cfg = spec.base;
    cfg.num_switches = k;
    cfg.alpha = alpha;
    cfg.seed = seed;
    const auto trained = train(train_set, cfg);
    const SwitchConfig switches(k);
    VideoSet preds, gts;
    for (const auto& v : eval_set) {
      preds.push_back(infer_instances(trained.params, v.features.view(), switches));
      gts.push_back(v.instances);
    }
    const auto rep = f1_at_tiou(preds, gts, spec.tiou_threshold);
    row.f1 = rep.f1;
    row.precision = rep.precision;
    row.recall = rep.recall;
    row.num_proposals = rep.num_pred;
    row.num_gt = rep.num_gt;
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
    spdlog::warn("sweep cell (switches={}, alpha={}, seed={}) failed: {}", k, alpha, seed, e.what());
  }
  return row;
}

}  // namespace

SweepResult sweep_alpha(std::span<const Video> train_set, std::span<const Video> eval_set,
                        const SweepSpec& spec) {
  if (spec.alphas.empty() || spec.switch_counts.empty() || spec.seeds.empty()) {
    throw DomainError("sweep grid must be non-empty");
  }
  struct Cell {
    int k;
    double alpha;
    std::uint64_t seed;
  };
  std::vector<int> ks = spec.switch_counts;
  std::vector<double> alphas = spec.alphas;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  std::vector<std::uint64_t> seeds = spec.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::vector<Cell> cells;
  for (int k : ks) {
    for (double a : alphas) {
      for (auto s : seeds) cells.push_back({k, a, s});
    }
  }

  SweepResult result;
  result.per_seed.resize(cells.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(cells.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      result.per_seed[i] = run_cell(train_set, eval_set, spec, cells[i].k, cells[i].alpha, cells[i].seed);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::size_t i = 0; i < cells.size(); i += seeds.size()) {
    SweepRow med;
    med.num_switches = cells[i].k;
    med.alpha = cells[i].alpha;
    med.seed = -1;
    std::vector<double> f1, p, r, props, ngt;
    for (std::size_t j = i; j < i + seeds.size(); ++j) {
      const auto& row = result.per_seed[j];
      if (row.failed) continue;
      f1.push_back(row.f1);
      p.push_back(row.precision);
      r.push_back(row.recall);
      props.push_back(static_cast<double>(row.num_proposals));
      ngt.push_back(static_cast<double>(row.num_gt));
    }
    if (f1.empty()) {
      med.failed = true;
      med.error = "all seeds failed";
    } else {
      med.f1 = median(f1);
      med.precision = median(p);
      med.recall = median(r);
      med.num_proposals = static_cast<std::size_t>(std::llround(median(props)));
      med.num_gt = static_cast<std::size_t>(std::llround(median(ngt)));
    }
    result.median.push_back(med);
  }
  return result;
}

}  // namespace actionswitch
