#include <gtest/gtest.h>

#include <random>

#include "match_oracle.hpp"
#include "random_instances.hpp"
#include "spectra/error.hpp"
#include "spectra/matcheval.hpp"

namespace spectra {
namespace {

Annotation gt_box(double x0, double y0, double x1, double y1, std::string scene = "s") {
  return make_annotation(std::move(scene), BBox{x0, y0, x1, y1});
}

Detection det(double x0, double y0, double x1, double y1, double c, std::string scene = "s") {
  return Detection{std::move(scene), BBox{x0, y0, x1, y1}, c};
}

// Two buildings, three detections; expected values from hand arithmetic:
// d2 vs B overlaps 9x9 = 81 over a union of 100 + 100 - 81 = 119.
struct HandFixture {
  std::vector<Annotation> gt{gt_box(0, 0, 10, 10), gt_box(20, 20, 30, 30)};
  std::vector<Detection> dets{det(0, 0, 10, 10, 0.9), det(21, 21, 31, 31, 0.8),
                              det(50, 50, 60, 60, 0.7)};
};

TEST(Iou, IdenticalDisjointAndHalfOverlap) {
  const BBox a{0, 0, 10, 10};
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou(a, BBox{20, 20, 30, 30}), 0.0);
  EXPECT_DOUBLE_EQ(iou(a, BBox{5, 0, 15, 10}), 50.0 / 150.0);
  EXPECT_DOUBLE_EQ(iou(a, BBox{10, 0, 20, 10}), 0.0);  // shared edge only
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto a = testing::random_box(rng), b = testing::random_box(rng);
    const BBox ba{a[0], a[1], a[2], a[3]}, bb{b[0], b[1], b[2], b[3]};
    const double v = iou(ba, bb);
    EXPECT_EQ(v, iou(bb, ba));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_DOUBLE_EQ(iou(ba, ba), 1.0);
    EXPECT_NEAR(v, testing::oracle_iou(a, b), 1e-15);
  }
}

TEST(Match, HandComputedFixture) {
  HandFixture f;
  const auto m = match(f.gt, f.dets, 0.5, 0.5);
  ASSERT_EQ(m.true_positives.size(), 2u);
  EXPECT_EQ(m.true_positives[0].detection, 0u);
  EXPECT_EQ(m.true_positives[0].gt, 0u);
  EXPECT_DOUBLE_EQ(m.true_positives[0].iou, 1.0);
  EXPECT_EQ(m.true_positives[1].detection, 1u);
  EXPECT_EQ(m.true_positives[1].gt, 1u);
  EXPECT_NEAR(m.true_positives[1].iou, 81.0 / 119.0, 1e-12);
  EXPECT_NEAR(m.true_positives[1].iou, 0.6807, 5e-5);
  ASSERT_EQ(m.false_positives.size(), 1u);
  EXPECT_EQ(m.false_positives[0].detection, 2u);
  EXPECT_EQ(m.false_positives[0].size, SizeCategory::Small);  // 10 x 10
  EXPECT_TRUE(m.false_negatives.empty());

  const auto c = tally(m, f.gt).overall;
  EXPECT_DOUBLE_EQ(c.precision(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.recall(), 1.0);
  EXPECT_DOUBLE_EQ(c.f1(), 0.8);
}

TEST(Match, EmptyDetectionsMakeEveryGroundTruthAMiss) {
  HandFixture f;
  const auto m = match(f.gt, {}, 0.5, 0.5);
  EXPECT_TRUE(m.true_positives.empty());
  EXPECT_TRUE(m.false_positives.empty());
  EXPECT_EQ(m.false_negatives, (std::vector<std::size_t>{0, 1}));
  const auto c = tally(m, f.gt).overall;
  EXPECT_EQ(c.precision(), 0.0);
  EXPECT_EQ(c.recall(), 0.0);
  EXPECT_EQ(c.f1(), 0.0);
}

TEST(Match, PerfectDetections) {
  HandFixture f;
  std::vector<Detection> dets;
  for (const auto& g : f.gt) dets.push_back({g.scene_id, g.bbox, 1.0});
  const auto c = tally(match(f.gt, dets, 0.5, 0.5), f.gt).overall;
  EXPECT_EQ(c.precision(), 1.0);
  EXPECT_EQ(c.recall(), 1.0);
  EXPECT_EQ(c.f1(), 1.0);
}

TEST(Match, ConfidenceThresholdIsInclusive) {
  HandFixture f;
  const auto m = match(f.gt, f.dets, 0.5, 0.8);
  EXPECT_EQ(m.true_positives.size(), 2u);
  EXPECT_TRUE(m.false_positives.empty());
}

TEST(Match, HigherIouThresholdTurnsLooseHitIntoMiss) {
  HandFixture f;
  const auto c = tally(match(f.gt, f.dets, 0.7, 0.5), f.gt).overall;
  EXPECT_EQ(c, (Counts{1, 2, 1}));
  // P = 1/3, R = 1/2, so F1 = 2TP / (2TP + FP + FN) = 2/5.
  EXPECT_DOUBLE_EQ(c.f1(), 0.4);
}

TEST(Match, EqualConfidenceVisitsLowerIndexFirst) {
  const std::vector<Annotation> gt{gt_box(0, 0, 10, 10)};
  const std::vector<Detection> dets{det(1, 0, 11, 10, 0.5), det(0, 0, 10, 10, 0.5)};
  const auto m = match(gt, dets, 0.5, 0.0);
  ASSERT_EQ(m.true_positives.size(), 1u);
  EXPECT_EQ(m.true_positives[0].detection, 0u);  // first in input, not best IoU
}

TEST(Match, ZeroOverlapNeverMatchesEvenAtZeroThreshold) {
  const std::vector<Annotation> gt{gt_box(0, 0, 10, 10)};
  const std::vector<Detection> dets{det(40, 40, 50, 50, 0.9)};
  const auto m = match(gt, dets, 0.0, 0.0);
  EXPECT_TRUE(m.true_positives.empty());
  EXPECT_EQ(m.false_positives.size(), 1u);
}

TEST(Match, FalsePositiveSizeUsesOwnArea) {
  const std::vector<Detection> dets{det(0, 0, 4, 4, 0.9), det(0, 0, 20, 20, 0.9)};
  const auto m = match({}, dets, 0.5, 0.5);
  ASSERT_EQ(m.false_positives.size(), 2u);
  EXPECT_EQ(m.false_positives[0].size, SizeCategory::BelowMinimum);
  EXPECT_EQ(m.false_positives[1].size, SizeCategory::VeryLarge);
}

TEST(Match, MixedScenesRejected) {
  const std::vector<Annotation> gt{gt_box(0, 0, 10, 10, "a")};
  const std::vector<Detection> dets{det(0, 0, 10, 10, 0.9, "b")};
  try {
    match(gt, dets, 0.5, 0.5);
    FAIL() << "expected SceneMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SceneMismatch);
  }
}

TEST(Match, BadThresholdsRejected) {
  EXPECT_THROW(match({}, {}, 1.5, 0.5), Error);
  EXPECT_THROW(match({}, {}, 0.5, -0.1), Error);
}

TEST(Match, AgreesWithOracleAndConservesCounts) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto inst = testing::random_instance(rng);
    const double iou_t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double conf_t = std::uniform_int_distribution<int>(0, 9)(rng) / 10.0;
    const auto m = match(inst.gt, inst.dets, iou_t, conf_t);
    const auto o = testing::oracle_greedy(inst.oracle_gt, inst.oracle_dets, iou_t, conf_t);
    ASSERT_EQ(m.true_positives.size(), o.tp.size());
    for (std::size_t i = 0; i < o.tp.size(); ++i) {
      EXPECT_EQ(m.true_positives[i].detection, o.tp[i].det);
      EXPECT_EQ(m.true_positives[i].gt, o.tp[i].gt);
    }
    ASSERT_EQ(m.false_positives.size(), o.fp.size());
    EXPECT_EQ(m.false_negatives, o.fn);

    std::size_t above = 0;
    for (const auto& d : inst.dets) above += d.confidence >= conf_t;
    EXPECT_EQ(m.true_positives.size() + m.false_negatives.size(), inst.gt.size());
    EXPECT_EQ(m.true_positives.size() + m.false_positives.size(), above);
    EXPECT_LE(m.true_positives.size(),
              testing::oracle_optimal_tp(inst.oracle_gt, inst.oracle_dets, iou_t, conf_t));
  }
}

TEST(Match, TruePositivesNonIncreasingInConfidence) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto inst = testing::random_instance(rng, 8, 8);
    std::size_t previous = SIZE_MAX;
    for (int c = 0; c <= 10; ++c) {
      const auto tp = match(inst.gt, inst.dets, 0.3, c / 10.0).true_positives.size();
      EXPECT_LE(tp, previous);
      previous = tp;
    }
  }
}

TEST(Match, SingleGroundTruthF1NonIncreasingInIou) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    auto inst = testing::random_instance(rng, 1, 5);
    if (inst.gt.empty()) continue;
    double previous = 2.0;
    for (int t = 0; t <= 20; ++t) {
      const double f1 = tally(match(inst.gt, inst.dets, t / 20.0, 0.0), inst.gt).overall.f1();
      EXPECT_LE(f1, previous + 1e-15);
      previous = f1;
    }
  }
}

TEST(Counts, F1IsHarmonicMean) {
  EXPECT_DOUBLE_EQ(f1_score(0.5, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(f1_score(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(f1_score(1.0, 0.0), 0.0);
  const Counts c{3, 1, 2};
  EXPECT_DOUBLE_EQ(c.f1(), 2 * 0.75 * 0.6 / (0.75 + 0.6));
}

std::vector<SceneEval> hand_scene() {
  HandFixture f;
  SceneEval s;
  s.scene = SceneRecord{"s", BBox{0, 0, 100, 100}, f.gt};
  s.detections = f.dets;
  return {s};
}

TEST(Report, SingleSceneMatchesHandFixture) {
  const auto scenes = hand_scene();
  const auto r = report(scenes, 0.5, 0.5);
  EXPECT_DOUBLE_EQ(r.overall.precision(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.overall.recall(), 1.0);
  EXPECT_DOUBLE_EQ(r.overall.f1(), 0.8);
  // Both ground-truth boxes are 100 m^2 (Small); the stray detection is too.
  EXPECT_EQ(r.by_size.at(SizeCategory::Small), (Counts{2, 1, 0}));
  EXPECT_EQ(r.by_size.size(), 5u);
  EXPECT_EQ(r.by_density.at(DensityCategory::Low), (Counts{2, 1, 0}));
  EXPECT_EQ(r.by_density.at(DensityCategory::High), Counts{});
}

TEST(Report, PerfectScenesGivePerfectStrata) {
  std::vector<SceneEval> scenes;
  for (const char* id : {"a", "b"}) {
    SceneEval s;
    s.scene.scene_id = id;
    s.scene.extent = {0, 0, 200, 200};
    s.scene.gt = {gt_box(0, 0, 5, 6, id), gt_box(10, 10, 20, 20, id), gt_box(30, 30, 50, 50, id)};
    for (const auto& g : s.scene.gt) s.detections.push_back({id, g.bbox, 1.0});
    scenes.push_back(s);
  }
  const auto r = report(scenes, 0.5, 0.5);
  EXPECT_EQ(r.overall.f1(), 1.0);
  for (auto c : {SizeCategory::VerySmall, SizeCategory::Small, SizeCategory::VeryLarge}) {
    EXPECT_EQ(r.by_size.at(c).precision(), 1.0);
    EXPECT_EQ(r.by_size.at(c).recall(), 1.0);
  }
  EXPECT_EQ(r.by_density.at(DensityCategory::Low).f1(), 1.0);
}

TEST(Report, DuplicateScenesRejected) {
  auto scenes = hand_scene();
  scenes.push_back(scenes.front());
  try {
    report(scenes, 0.5, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateScene);
  }
}

TEST(Report, PooledEqualsConcatenatedScene) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<SceneEval> scenes;
    SceneEval merged;
    merged.scene.scene_id = "s";
    const int n = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int k = 0; k < n; ++k) {
      auto inst = testing::random_instance(rng);
      // Shift each scene far apart so merging cannot create new overlaps.
      const double off = 100.0 * k;
      SceneEval s;
      s.scene.scene_id = "s" + std::to_string(k);
      for (auto g : inst.gt) {
        g.scene_id = s.scene.scene_id;
        s.scene.gt.push_back(g);
        g.scene_id = "s";
        g.bbox.x_min += off;
        g.bbox.x_max += off;
        merged.scene.gt.push_back(g);
      }
      for (auto d : inst.dets) {
        d.scene_id = s.scene.scene_id;
        s.detections.push_back(d);
        d.scene_id = "s";
        d.bbox.x_min += off;
        d.bbox.x_max += off;
        merged.detections.push_back(d);
      }
      scenes.push_back(s);
    }
    const auto split = report(scenes, 0.4, 0.3);
    const auto whole = report(std::span(&merged, 1), 0.4, 0.3);
    EXPECT_EQ(split.overall, whole.overall);
  }
}

TEST(Report, ParallelMatchesSerial) {
  std::mt19937_64 rng(17);
  std::vector<SceneEval> scenes;
  for (int k = 0; k < 64; ++k) {
    auto inst = testing::random_instance(rng, 6, 6);
    SceneEval s;
    s.scene.scene_id = "scene" + std::to_string(k);
    for (auto g : inst.gt) {
      g.scene_id = s.scene.scene_id;
      s.scene.gt.push_back(g);
    }
    for (auto d : inst.dets) {
      d.scene_id = s.scene.scene_id;
      s.detections.push_back(d);
    }
    scenes.push_back(s);
  }
  const auto serial = report(scenes, 0.5, 0.5, {1});
  const auto parallel = report(scenes, 0.5, 0.5, {8});
  EXPECT_EQ(serial.overall, parallel.overall);
  EXPECT_EQ(serial.by_size, parallel.by_size);
  EXPECT_EQ(serial.by_density, parallel.by_density);
}

TEST(Grid, HandFixtureAcrossIouThresholds) {
  const auto scenes = hand_scene();
  const std::vector<double> ious{0.5, 0.7}, confs{0.5};
  const auto grid = f1_grid(scenes, ious, confs);
  ASSERT_EQ(grid.size(), 2u);
  EXPECT_DOUBLE_EQ(grid[0].overall.f1(), 0.8);
  EXPECT_DOUBLE_EQ(grid[1].overall.f1(), 0.4);
  EXPECT_EQ(grid[1].overall, (Counts{1, 2, 1}));
}

TEST(Grid, PerfectDetectionsGiveAllOnes) {
  SceneEval s;
  s.scene = {"p", BBox{0, 0, 100, 100}, {gt_box(0, 0, 6, 6, "p"), gt_box(10, 10, 30, 30, "p")}};
  for (const auto& g : s.scene.gt) s.detections.push_back({"p", g.bbox, 1.0});
  const auto grid = f1_grid(std::span(&s, 1), kDefaultGridIou, kDefaultGridConf);
  EXPECT_EQ(grid.size(), 12u);
  for (const auto& cell : grid) EXPECT_EQ(cell.overall.f1(), 1.0);
}

TEST(Grid, EmptyThresholdSetRejected) {
  const auto scenes = hand_scene();
  EXPECT_THROW(f1_grid(scenes, std::vector<double>{}, kDefaultGridConf), Error);
}

}  // namespace
}  // namespace spectra
