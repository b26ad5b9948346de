#pragma once

// Cross-entropy plus the conservativeness penalty, with exact gradients
// w.r.t. the logits.
//
// The penalty at step t is -log softmax(logits_t)[s_{t-1}] when the model's own
// argmax changes from s_{t-1}, else 0. Pseudo-labels and the change mask are
// treated as constants when differentiating. Argmax ties go to the lowest index.

#include <cstddef>
#include <span>

#include "actionswitch/switchboard.hpp"
#include "actionswitch/tensor.hpp"

namespace actionswitch {

// T x S unnormalized scores, one row per frame.
using LogitSequence = Matrix;

struct LossResult {
  double total = 0.0;
  double ce_part = 0.0;
  double cons_part = 0.0;
  Matrix grad;  // d total / d logits, same shape as the input
  std::size_t num_cc_positions = 0;
};

// Lowest index among the maxima.
std::size_t argmax(std::span<const double> row);

// log sum exp with the row max subtracted.
double log_sum_exp(std::span<const double> row);

double conservativeness_term(std::span<const double> logits_t, StateLabel prev_state);

LossResult sequence_loss_and_grad(const LogitSequence& logits, std::span<const StateLabel> gt_states,
                                  double alpha);

// Mean over (b, t >= 1) positions where argmax changes of the cross entropy
// against the previous argmax; 0 when no position changes. All sequences must
// share length L >= 2 and width S.
double batched_cc_loss(std::span<const LogitSequence> batch);

}  // namespace actionswitch
