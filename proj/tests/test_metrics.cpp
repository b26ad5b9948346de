#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "actionswitch/errors.hpp"
#include "actionswitch/metrics.hpp"
#include "oracles.hpp"

using namespace actionswitch;

namespace {

ActionInterval iv(std::int64_t s, std::int64_t e) { return {.start_frame = s, .end_frame = e}; }

ActionInterval scored(std::int64_t s, std::int64_t e, int cls, double score) {
  return {.start_frame = s, .end_frame = e, .class_id = cls, .score = score};
}

ActionInterval classed(std::int64_t s, std::int64_t e, int cls) {
  return {.start_frame = s, .end_frame = e, .class_id = cls};
}

std::vector<ActionInterval> random_intervals(std::mt19937_64& rng, std::size_t n, int num_classes = 0) {
  std::uniform_int_distribution<std::int64_t> start(0, 60), len(1, 20);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<ActionInterval> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = start(rng);
    ActionInterval a = iv(s, s + len(rng) - 1);
    a.score = score(rng);
    if (num_classes > 0) a.class_id = static_cast<int>(rng() % num_classes);
    out.push_back(a);
  }
  return out;
}

}  // namespace

TEST(Tiou, Examples) {
  EXPECT_EQ(tiou(iv(0, 9), iv(0, 9)), 1.0);
  EXPECT_NEAR(tiou(iv(0, 9), iv(5, 14)), 5.0 / 15.0, 1e-15);
  EXPECT_EQ(tiou(iv(0, 4), iv(10, 12)), 0.0);
  EXPECT_NEAR(tiou(iv(3, 3), iv(3, 4)), 0.5, 1e-15);
}

TEST(Tiou, SymmetricAndMatchesFrameCounting) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto v = random_intervals(rng, 2);
    EXPECT_EQ(tiou(v[0], v[1]), tiou(v[1], v[0]));
    EXPECT_EQ(tiou(v[0], v[0]), 1.0);
    EXPECT_NEAR(tiou(v[0], v[1]),
                oracle::interval_iou(v[0].start_frame, v[0].end_frame, v[1].start_frame, v[1].end_frame),
                1e-15);
  }
}

TEST(Hungarian, Examples) {
  Matrix a(2, 2);
  a.values() = {1, 2, 2, 1};
  auto r = hungarian_assign(a);
  EXPECT_EQ(r.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
  EXPECT_EQ(r.total_cost, 2.0);

  Matrix b(2, 2);
  b.values() = {4, 1, 2, 3};
  r = hungarian_assign(b);
  EXPECT_EQ(r.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}}));
  EXPECT_EQ(r.total_cost, 3.0);
}

TEST(Hungarian, EmptyAndNonFinite) {
  EXPECT_TRUE(hungarian_assign(Matrix(0, 3)).pairs.empty());
  EXPECT_TRUE(hungarian_assign(Matrix(3, 0)).pairs.empty());
  Matrix bad(2, 2);
  bad(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(hungarian_assign(bad), DomainError);
}

TEST(Hungarian, RectangularTakesMinDimension) {
  Matrix wide(2, 4);
  wide.values() = {5, 9, 1, 7, 8, 2, 6, 3};
  const auto r = hungarian_assign(wide);
  EXPECT_EQ(r.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {1, 1}}));
  Matrix tall(3, 1);
  tall.values() = {4, -1, 2};
  EXPECT_EQ(hungarian_assign(tall).pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}}));
}

TEST(Hungarian, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng() % 7, n = 1 + rng() % 7;
    Matrix c(m, n);
    // integer costs make ties common
    for (double& v : c.values()) v = trial % 2 ? std::round(u(rng)) : u(rng);
    const auto r = hungarian_assign(c);
    EXPECT_EQ(r.pairs.size(), std::min(m, n));
    std::set<std::size_t> rows, cols;
    for (auto [i, j] : r.pairs) {
      rows.insert(i);
      cols.insert(j);
    }
    EXPECT_EQ(rows.size(), r.pairs.size());
    EXPECT_EQ(cols.size(), r.pairs.size());
    EXPECT_EQ(r.total_cost, oracle::brute_force_assignment(c)) << m << "x" << n;
  }
}

TEST(F1, Examples) {
  const VideoSet gts{{iv(0, 9), iv(20, 30)}};
  auto r = f1_at_tiou(gts, gts, 0.5);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.tp, 2u);

  r = f1_at_tiou(VideoSet{{iv(0, 9)}}, VideoSet{{iv(5, 14)}}, 0.5);
  EXPECT_EQ(r.tp, 0u);
  EXPECT_EQ(r.f1, 0.0);

  r = f1_at_tiou(VideoSet{{iv(0, 9), iv(40, 50)}}, VideoSet{{iv(0, 9)}}, 0.5);
  EXPECT_EQ(r.precision, 0.5);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_NEAR(r.f1, 2.0 / 3.0, 1e-15);
}

TEST(F1, EmptyConventionAndErrors) {
  const auto r = f1_at_tiou(VideoSet{{}, {}}, VideoSet{{}, {}}, 0.5);
  EXPECT_TRUE(r.empty_convention);
  EXPECT_EQ(r.f1, 1.0);
  const auto none = f1_at_tiou(VideoSet{{}}, VideoSet{{iv(0, 3)}}, 0.5);
  EXPECT_FALSE(none.empty_convention);
  EXPECT_EQ(none.f1, 0.0);
  EXPECT_THROW(f1_at_tiou(VideoSet{{}}, VideoSet{{}}, 0.0), DomainError);
  EXPECT_THROW(f1_at_tiou(VideoSet{{}}, VideoSet{{}}, 1.5), DomainError);
  EXPECT_THROW(f1_at_tiou(VideoSet{{}}, VideoSet{{}, {}}, 0.5), DomainError);
}

TEST(F1, MicroAveragesAcrossVideos) {
  const VideoSet preds{{iv(0, 9)}, {iv(0, 9), iv(30, 40), iv(60, 70)}};
  const VideoSet gts{{iv(0, 9)}, {iv(100, 110)}};
  const auto r = f1_at_tiou(preds, gts, 0.5);
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.num_pred, 4u);
  EXPECT_EQ(r.num_gt, 2u);
  EXPECT_EQ(r.precision, 0.25);
  EXPECT_EQ(r.recall, 0.5);
}

TEST(F1, PassCountBeatsTotalTiou) {
  // Maximizing summed tIoU alone pairs p0-g0 (0.8) and p1-g1 (0.1) for one
  // pass; pairing p0-g1 and p1-g0 gives two passes.
  const VideoSet preds{{iv(0, 9), iv(2, 11)}};
  const VideoSet gts{{iv(0, 7), iv(1, 10)}};
  const auto r = f1_at_tiou(preds, gts, 0.75);
  EXPECT_EQ(r.tp, oracle::brute_force_tp(preds[0], gts[0], 0.75));
}

TEST(F1, TpMatchesBruteForceOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_intervals(rng, rng() % 7);
    const auto g = random_intervals(rng, rng() % 7);
    for (double theta : {0.1, 0.3, 0.5, 0.7}) {
      const auto r = f1_at_tiou(VideoSet{p}, VideoSet{g}, theta);
      EXPECT_EQ(r.tp, oracle::brute_force_tp(p, g, theta));
      std::set<std::size_t> used_p, used_g;
      for (const auto& m : r.pairs) {
        EXPECT_TRUE(used_p.insert(m.pred).second);
        EXPECT_TRUE(used_g.insert(m.gt).second);
        EXPECT_GE(m.tiou, theta);
      }
    }
  }
}

TEST(AveragePrecision, Envelope) {
  EXPECT_EQ(average_precision({true}, 1), 1.0);
  EXPECT_EQ(average_precision({false, true}, 1), 0.5);
  EXPECT_EQ(average_precision({}, 3), 0.0);
  EXPECT_EQ(average_precision({true}, 0), 0.0);
  // ranks: hit (1/1), miss, hit (2/3), hit (3/4) out of 4 gts
  EXPECT_NEAR(average_precision({true, false, true, true}, 4), (1.0 + 0.75 + 0.75) / 4.0, 1e-15);
}

TEST(IntervalMap, Examples) {
  const VideoSet gts{{classed(0, 9, 0), classed(20, 29, 1)}};
  VideoSet perfect{{scored(0, 9, 0, 0.5), scored(20, 29, 1, 0.7)}};
  const std::vector<double> thresholds{0.3, 0.5, 0.7, 0.9, 1.0};
  const auto r = interval_map(perfect, gts, thresholds);
  for (double m : r.map_per_threshold) EXPECT_EQ(m, 1.0);
  EXPECT_EQ(r.average_map, 1.0);

  const VideoSet one_gt{{classed(0, 9, 0)}};
  const std::vector<double> half{0.5};
  EXPECT_EQ(interval_map(VideoSet{{scored(0, 9, 0, 0.9), scored(40, 49, 0, 0.8)}}, one_gt, half)
                .map_per_threshold[0],
            1.0);
  EXPECT_EQ(interval_map(VideoSet{{scored(0, 9, 0, 0.8), scored(40, 49, 0, 0.9)}}, one_gt, half)
                .map_per_threshold[0],
            0.5);
}

TEST(IntervalMap, ClassMustAgree) {
  const VideoSet gts{{classed(0, 9, 0)}};
  const std::vector<double> half{0.5};
  EXPECT_EQ(interval_map(VideoSet{{scored(0, 9, 1, 0.9)}}, gts, half).map_per_threshold[0], 0.0);
}

TEST(IntervalMap, Errors) {
  const std::vector<double> half{0.5};
  EXPECT_THROW(interval_map(VideoSet{{iv(0, 1)}}, VideoSet{{classed(0, 1, 0)}}, half), DomainError);
  EXPECT_THROW(interval_map(VideoSet{{scored(0, 1, 0, 1)}}, VideoSet{{iv(0, 1)}}, half), DomainError);
}

TEST(IntervalMap, BoundsAndRemovingCorrectPrediction) {
  std::mt19937_64 rng(4);
  const std::vector<double> thresholds{0.3, 0.5, 0.7};
  for (int trial = 0; trial < 200; ++trial) {
    auto gt = random_intervals(rng, 1 + rng() % 6, 2);
    for (auto& g : gt) g.score.reset();
    auto preds = random_intervals(rng, rng() % 8, 2);
    // plant exact predictions that outrank everything else, so each is a true
    // positive at every threshold
    for (const auto& g : gt) {
      if (rng() % 2) preds.push_back(scored(g.start_frame, g.end_frame, *g.class_id, 1.0 + 0.01 * preds.size()));
    }
    const auto base = interval_map(VideoSet{preds}, VideoSet{gt}, thresholds);
    for (const auto& per_class : base.ap_per_class) {
      for (const auto& [c, ap] : per_class) {
        EXPECT_GE(ap, 0.0);
        EXPECT_LE(ap, 1.0);
      }
    }
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (*preds[i].score < 1.0) continue;
      // only predictions whose gt no other prediction could claim; otherwise
      // a lower-ranked duplicate inherits the hit and AP can rise
      const bool contested = std::any_of(preds.begin(), preds.end(), [&](const ActionInterval& q) {
        return &q != &preds[i] && q.class_id == preds[i].class_id && tiou(q, preds[i]) >= thresholds.front();
      });
      if (contested) continue;
      auto fewer = preds;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
      const auto r = interval_map(VideoSet{fewer}, VideoSet{gt}, thresholds);
      for (std::size_t k = 0; k < thresholds.size(); ++k) {
        for (const auto& [c, ap] : r.ap_per_class[k]) {
          EXPECT_LE(ap, base.ap_per_class[k].at(c) + 1e-12);
        }
      }
    }
  }
}

TEST(PointMap, Examples) {
  const VideoSet gts{{classed(14, 30, 0)}};
  const std::vector<std::int64_t> offsets{1, 2, 3};
  const auto far = point_map(VideoSet{{scored(10, 30, 0, 0.9)}}, gts, offsets);
  for (double ap : far.ap_per_offset) EXPECT_EQ(ap, 0.0);
  const std::vector<std::int64_t> four{4};
  EXPECT_EQ(point_map(VideoSet{{scored(10, 30, 0, 0.9)}}, gts, four).ap_per_offset[0], 1.0);
  const auto exact = point_map(VideoSet{{scored(14, 20, 0, 0.1)}}, gts, offsets);
  for (double ap : exact.ap_per_offset) EXPECT_EQ(ap, 1.0);
  EXPECT_TRUE(exact.classwise);
}

TEST(PointMap, PooledWhenGroundTruthUnclassed) {
  const VideoSet gts{{iv(5, 9), iv(50, 60)}};
  ActionInterval p = iv(6, 9);
  p.score = 0.4;
  const std::vector<std::int64_t> offsets{2};
  const auto r = point_map(VideoSet{{p}}, gts, offsets);
  EXPECT_FALSE(r.classwise);
  EXPECT_EQ(r.ap_per_offset[0], 0.5);
}

TEST(PointMap, Errors) {
  const std::vector<std::int64_t> offsets{1};
  EXPECT_THROW(point_map(VideoSet{{iv(0, 1)}}, VideoSet{{iv(0, 1)}}, offsets), DomainError);
  const std::vector<std::int64_t> zero{0};
  EXPECT_THROW(point_map(VideoSet{{}}, VideoSet{{iv(0, 1)}}, zero), DomainError);
}

TEST(PointMap, MonotoneInOffset) {
  std::mt19937_64 rng(5);
  std::vector<std::int64_t> offsets;
  for (std::int64_t o = 1; o <= 30; ++o) offsets.push_back(o);
  for (int trial = 0; trial < 300; ++trial) {
    const int classes = trial % 2 ? 3 : 0;
    VideoSet preds, gts;
    for (int v = 0; v < 2; ++v) {
      preds.push_back(random_intervals(rng, rng() % 10, classes));
      auto g = random_intervals(rng, rng() % 8, classes);
      for (auto& x : g) x.score.reset();
      gts.push_back(g);
    }
    const auto r = point_map(preds, gts, offsets);
    for (std::size_t k = 1; k < offsets.size(); ++k) {
      EXPECT_GE(r.ap_per_offset[k], r.ap_per_offset[k - 1]) << "trial " << trial << " offset " << offsets[k];
    }
  }
}
