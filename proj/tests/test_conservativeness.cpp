#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "actionswitch/conservativeness.hpp"
#include "actionswitch/errors.hpp"
#include "oracles.hpp"

using namespace actionswitch;

namespace {

Matrix from_rows(std::vector<std::vector<double>> rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Matrix random_logits(std::mt19937_64& rng, std::size_t T, std::size_t S, double scale = 2.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(T, S);
  for (double& v : m.values()) v = n(rng);
  return m;
}

std::vector<StateLabel> random_labels(std::mt19937_64& rng, std::size_t T, std::size_t S) {
  std::vector<StateLabel> out;
  for (std::size_t t = 0; t < T; ++t) out.emplace_back(static_cast<std::uint32_t>(rng() % S));
  return out;
}

}  // namespace

TEST(ConservativenessTerm, PenalizesChangeWithPreviousStateTarget) {
  const std::vector<double> probs{0.2, 0.7, 0.05, 0.05};
  std::vector<double> logits;
  for (double p : probs) logits.push_back(std::log(p));
  EXPECT_NEAR(conservativeness_term(logits, StateLabel(0)), 1.6094379124341003, 1e-12);
}

TEST(ConservativenessTerm, ZeroWhenArgmaxEqualsPrevious) {
  const std::vector<double> logits{0.1, 3.0, -1.0};
  EXPECT_EQ(conservativeness_term(logits, StateLabel(1)), 0.0);
}

TEST(ConservativenessTerm, TieBreakGoesToLowestIndex) {
  const std::vector<double> near_tie{10.0, 10.0 - 1e-9, -100.0, -100.0};
  EXPECT_NEAR(conservativeness_term(near_tie, StateLabel(1)), std::log(2.0), 1e-8);
  const std::vector<double> exact_tie{5.0, 5.0, 0.0};
  EXPECT_EQ(argmax(exact_tie), 0u);
  EXPECT_GT(conservativeness_term(exact_tie, StateLabel(1)), 0.0);
  EXPECT_EQ(conservativeness_term(exact_tie, StateLabel(0)), 0.0);
}

TEST(ConservativenessTerm, LargeLogitsStayFinite) {
  const std::vector<double> logits{1e4, -1e4, 0.0};
  EXPECT_NEAR(conservativeness_term(logits, StateLabel(1)), 2e4, 1e-9);
}

TEST(ConservativenessTerm, Errors) {
  const std::vector<double> bad{0.0, std::nan("")};
  EXPECT_THROW(conservativeness_term(bad, StateLabel(0)), DomainError);
  const std::vector<double> one{1.0};
  EXPECT_THROW(conservativeness_term(one, StateLabel(0)), DomainError);
  const std::vector<double> two{1.0, 2.0};
  EXPECT_THROW(conservativeness_term(two, StateLabel(2)), DomainError);
}

TEST(SequenceLoss, SingleFrameIsPureCrossEntropy) {
  const auto logits = from_rows({{0.0, 0.0}});
  const std::vector<StateLabel> gt{StateLabel(1)};
  const auto r = sequence_loss_and_grad(logits, gt, 0.5);
  EXPECT_NEAR(r.total, std::log(2.0), 1e-15);
  EXPECT_EQ(r.cons_part, 0.0);
  EXPECT_EQ(r.num_cc_positions, 0u);
  EXPECT_NEAR(r.grad(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(r.grad(0, 1), -0.5, 1e-15);
}

TEST(SequenceLoss, ConfidentConstantPredictionIsNearZero) {
  Matrix logits(10, 4, -30.0);
  std::vector<StateLabel> gt;
  for (std::size_t t = 0; t < 10; ++t) {
    logits(t, 2) = 30.0;
    gt.emplace_back(2);
  }
  const auto r = sequence_loss_and_grad(logits, gt, 0.1);
  EXPECT_LT(r.total, 1e-20);
  EXPECT_EQ(r.num_cc_positions, 0u);
}

TEST(SequenceLoss, Errors) {
  Matrix logits(3, 2);
  EXPECT_THROW(sequence_loss_and_grad(logits, std::vector<StateLabel>(2), 0.0), DomainError);
  EXPECT_THROW(sequence_loss_and_grad(logits, std::vector<StateLabel>(3), -0.1), DomainError);
  std::vector<StateLabel> out_of_range(3, StateLabel(2));
  EXPECT_THROW(sequence_loss_and_grad(logits, out_of_range, 0.0), DomainError);
}

TEST(SequenceLoss, GradientMatchesFiniteDifferences8x4) {
  std::mt19937_64 rng(2024);
  Matrix logits = random_logits(rng, 8, 4);
  while (oracle::min_top2_gap(logits) < 1e-3) logits = random_logits(rng, 8, 4);
  const auto gt = random_labels(rng, 8, 4);
  std::vector<std::size_t> gt_idx;
  for (auto s : gt) gt_idx.push_back(s.value());

  const auto r = sequence_loss_and_grad(logits, gt, 0.025);
  EXPECT_NEAR(r.total, oracle::reference_loss(logits, gt_idx, 0.025), 1e-12);
  const auto fd = oracle::central_diff(
      [&](std::vector<double>& x) {
        Matrix m(8, 4);
        m.values() = x;
        return oracle::reference_loss(m, gt_idx, 0.025);
      },
      logits.values(), 1e-4);
  for (std::size_t i = 0; i < fd.size(); ++i) {
    EXPECT_LT(oracle::rel_err(r.grad.values()[i], fd[i]), 1e-5) << "entry " << i;
  }
}

TEST(SequenceLoss, ZeroChangeLaw) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 1 + rng() % 12, S = 2 + rng() % 5;
    Matrix logits = random_logits(rng, T, S);
    const auto r = sequence_loss_and_grad(logits, random_labels(rng, T, S), 0.3);
    bool any_change = false;
    for (std::size_t t = 1; t < T; ++t) {
      any_change |= oracle::naive_argmax(logits.row(t)) != oracle::naive_argmax(logits.row(t - 1));
    }
    EXPECT_EQ(r.cons_part == 0.0, !any_change);
    EXPECT_EQ(r.num_cc_positions == 0, !any_change);
  }
}

TEST(SequenceLoss, ShiftInvariance) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 2 + rng() % 10, S = 2 + rng() % 6;
    Matrix logits = random_logits(rng, T, S);
    const auto gt = random_labels(rng, T, S);
    Matrix shifted = logits;
    std::normal_distribution<double> c(0.0, 50.0);
    for (std::size_t t = 0; t < T; ++t) {
      const double k = c(rng);
      for (double& v : shifted.row(t)) v += k;
    }
    const auto a = sequence_loss_and_grad(logits, gt, 0.05);
    const auto b = sequence_loss_and_grad(shifted, gt, 0.05);
    EXPECT_NEAR(a.total, b.total, 1e-10);
    for (std::size_t i = 0; i < a.grad.values().size(); ++i) {
      EXPECT_NEAR(a.grad.values()[i], b.grad.values()[i], 1e-10);
    }
  }
}

TEST(SequenceLoss, AlphaLinearity) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 2 + rng() % 10, S = 2 + rng() % 6;
    Matrix logits = random_logits(rng, T, S);
    const auto gt = random_labels(rng, T, S);
    const auto r0 = sequence_loss_and_grad(logits, gt, 0.0);
    for (double alpha : {0.01, 0.025, 0.5, 2.0}) {
      const auto r = sequence_loss_and_grad(logits, gt, alpha);
      EXPECT_NEAR(r.total, r0.total + alpha * r.cons_part, 1e-12 * std::max(1.0, r.total));
      EXPECT_EQ(r.ce_part, r0.ce_part);
      EXPECT_EQ(r.cons_part, r0.cons_part);
    }
  }
}

TEST(BatchedCcLoss, ConstantPredictionsGiveZero) {
  std::vector<Matrix> batch{from_rows({{2, 1, 0}, {3, 0, 0}, {5, 4, 1}}),
                            from_rows({{0, 1, 0}, {0, 2, 0}, {-1, 0, -2}})};
  EXPECT_EQ(batched_cc_loss(batch), 0.0);
}

TEST(BatchedCcLoss, SingleChange) {
  const std::vector<Matrix> batch{from_rows({{std::log(0.9), std::log(0.1)},
                                             {std::log(0.1), std::log(0.9)}})};
  EXPECT_NEAR(batched_cc_loss(batch), -std::log(0.1), 1e-12);
}

TEST(BatchedCcLoss, ConstantSequenceContributesNothing) {
  const Matrix changing = from_rows({{1, 0, 0}, {0, 2, 0}, {0, 0, 3}, {0, 0, 1}});
  const Matrix constant = from_rows({{4, 0, 0}, {4, 1, 0}, {4, 0, 2}, {4, 3, 3}});
  const std::vector<Matrix> alone{changing};
  const std::vector<Matrix> both{changing, constant};
  EXPECT_DOUBLE_EQ(batched_cc_loss(both), batched_cc_loss(alone));
}

TEST(BatchedCcLoss, Errors) {
  const std::vector<Matrix> short_seq{Matrix(1, 3)};
  EXPECT_THROW(batched_cc_loss(short_seq), DomainError);
  const std::vector<Matrix> ragged{Matrix(3, 3), Matrix(4, 3)};
  EXPECT_THROW(batched_cc_loss(ragged), DomainError);
}

TEST(BatchedCcLoss, MatchesSequenceConsPart) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t T = 2 + rng() % 20, S = 2 + rng() % 7;
    const Matrix logits = random_logits(rng, T, S);
    const auto r = sequence_loss_and_grad(logits, random_labels(rng, T, S), 0.0);
    const std::vector<Matrix> batch{logits};
    EXPECT_EQ(batched_cc_loss(batch), r.cons_part);
  }
}
