#include "actionswitch/conservativeness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "actionswitch/errors.hpp"

namespace actionswitch {

namespace {

void check_finite(std::span<const double> row) {
  for (double v : row) {
    if (!std::isfinite(v)) throw DomainError("non-finite logit");
  }
}

// softmax(row) - onehot(target), scaled, added into out.
void accumulate_ce_grad(std::span<const double> row, std::size_t target, double lse, double scale,
                        std::span<double> out) {
  for (std::size_t s = 0; s < row.size(); ++s) {
    out[s] += scale * std::exp(row[s] - lse);
  }
  out[target] -= scale;
}

}  // namespace

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t s = 1; s < row.size(); ++s) {
    if (row[s] > row[best]) best = s;
  }
  return best;
}

double log_sum_exp(std::span<const double> row) {
  const double m = *std::max_element(row.begin(), row.end());
  double acc = 0.0;
  for (double v : row) acc += std::exp(v - m);
  return m + std::log(acc);
}

double conservativeness_term(std::span<const double> logits_t, StateLabel prev_state) {
  if (logits_t.size() < 2) throw DomainError("need at least 2 states");
  if (prev_state.value() >= logits_t.size()) {
    throw DomainError("previous state " + std::to_string(prev_state.value()) + " out of range");
  }
  check_finite(logits_t);
  if (argmax(logits_t) == prev_state.value()) return 0.0;
  return log_sum_exp(logits_t) - logits_t[prev_state.value()];
}

LossResult sequence_loss_and_grad(const LogitSequence& logits, std::span<const StateLabel> gt_states,
                                  double alpha) {
  const std::size_t T = logits.rows();
  const std::size_t S = logits.cols();
  if (T == 0) throw DomainError("empty logit sequence");
  if (gt_states.size() != T) {
    throw DomainError("logits have " + std::to_string(T) + " rows but " +
                      std::to_string(gt_states.size()) + " labels");
  }
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  if (S < 2) throw DomainError("need at least 2 states");

  std::vector<double> lse(T);
  std::vector<std::size_t> pred(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto row = logits.row(t);
    check_finite(row);
    if (gt_states[t].value() >= S) {
      throw DomainError("label " + std::to_string(gt_states[t].value()) + " at frame " +
                        std::to_string(t) + " out of range");
    }
    lse[t] = log_sum_exp(row);
    pred[t] = argmax(row);
  }

  LossResult r;
  r.grad = Matrix(T, S);

  double ce_sum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    ce_sum += lse[t] - logits(t, gt_states[t].value());
  }
  r.ce_part = ce_sum / static_cast<double>(T);

  double cc_sum = 0.0;
  for (std::size_t t = 1; t < T; ++t) {
    if (pred[t] != pred[t - 1]) {
      cc_sum += lse[t] - logits(t, pred[t - 1]);
      ++r.num_cc_positions;
    }
  }
  r.cons_part = r.num_cc_positions ? cc_sum / static_cast<double>(r.num_cc_positions) : 0.0;
  r.total = r.ce_part + alpha * r.cons_part;

  const double ce_scale = 1.0 / static_cast<double>(T);
  for (std::size_t t = 0; t < T; ++t) {
    accumulate_ce_grad(logits.row(t), gt_states[t].value(), lse[t], ce_scale, r.grad.row(t));
  }
  if (r.num_cc_positions && alpha > 0.0) {
    const double cc_scale = alpha / static_cast<double>(r.num_cc_positions);
    for (std::size_t t = 1; t < T; ++t) {
      if (pred[t] != pred[t - 1]) {
        accumulate_ce_grad(logits.row(t), pred[t - 1], lse[t], cc_scale, r.grad.row(t));
      }
    }
  }
  return r;
}

double batched_cc_loss(std::span<const LogitSequence> batch) {
  if (batch.empty()) throw DomainError("empty batch");
  const std::size_t L = batch.front().rows();
  const std::size_t S = batch.front().cols();
  if (L < 2) throw DomainError("sequence length must be >= 2");
  for (const auto& seq : batch) {
    if (seq.rows() != L || seq.cols() != S) throw DomainError("ragged batch");
  }

  // argmax over the state axis, then compare neighbours
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& seq : batch) {
    std::size_t prev = argmax(seq.row(0));
    check_finite(seq.row(0));
    for (std::size_t t = 1; t < L; ++t) {
      const auto row = seq.row(t);
      check_finite(row);
      const std::size_t cur = argmax(row);
      if (cur != prev) {
        sum += log_sum_exp(row) - row[prev];
        ++count;
      }
      prev = cur;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace actionswitch
