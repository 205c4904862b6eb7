#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spectra/annotate.hpp"
#include "spectra/geometry.hpp"

namespace spectra {

struct Detection {
  std::string scene_id;
  BBox bbox;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct TruePositive {
  std::size_t detection = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

struct FalsePositive {
  std::size_t detection = 0;
  SizeCategory size = SizeCategory::BelowMinimum;  // from the detection's own area
};

/// Indices refer to positions in the inputs given to match().
struct MatchOutcome {
  std::vector<TruePositive> true_positives;
  std::vector<FalsePositive> false_positives;
  std::vector<std::size_t> false_negatives;
};

/// Greedy confidence-ordered matching for one scene.
///
/// Detections below `conf_thresh` are discarded. Survivors are visited by
/// descending confidence (ties: lower input index first); each is paired
/// with the still-unmatched ground truth of highest IoU (ties: lower gt
/// index). The pair is a true positive when that IoU is positive and at
/// least `iou_thresh`, and the ground truth is retired; otherwise the
/// detection is a false positive. Unmatched ground truth are false
/// negatives. Throws SceneMismatch when scene ids differ.
MatchOutcome match(std::span<const Annotation> gt, std::span<const Detection> dets,
                   double iou_thresh, double conf_thresh);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  /// 0 when there are no detections.
  double precision() const noexcept;
  double recall() const noexcept;
  /// Harmonic mean of precision and recall; 0 when both are 0.
  double f1() const noexcept;

  Counts& operator+=(const Counts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

double f1_score(double precision, double recall) noexcept;

using SizeCounts = std::map<SizeCategory, Counts>;
using DensityCounts = std::map<DensityCategory, Counts>;

/// Per-scene tallies: overall, and by size where TP/FN use the ground
/// truth's category and FP the detection's own. BelowMinimum entries are
/// kept in `by_size` but are not one of the reported strata.
struct SceneTally {
  Counts overall;
  SizeCounts by_size;
};

SceneTally tally(const MatchOutcome& outcome, std::span<const Annotation> gt);

struct SceneEval {
  SceneRecord scene;
  std::vector<Detection> detections;
};

struct GridCell {
  double iou = 0.0;
  double conf = 0.0;
  Counts overall;
  SizeCounts by_size;
};

struct EvalReport {
  double iou_thresh = 0.5;
  double conf_thresh = 0.5;
  Counts overall;
  SizeCounts by_size;        // the five reported size strata
  DensityCounts by_density;  // Low, Moderate, High
  std::vector<GridCell> grid;
};

struct EvalOptions {
  std::size_t jobs = 1;  // 0 = hardware concurrency
};

inline constexpr std::array<double, 4> kDefaultGridIou{0.2, 0.3, 0.4, 0.5};
inline constexpr std::array<double, 3> kDefaultGridConf{0.2, 0.5, 0.75};

/// Micro-averaged evaluation across scenes. Scenes are matched
/// independently (in parallel when jobs > 1) and folded in scene-id order.
/// Each scene's counts go to its density stratum. Throws DuplicateScene.
EvalReport report(std::span<const SceneEval> scenes, double iou_thresh, double conf_thresh,
                  const EvalOptions& options = {});

/// Fresh match runs for every (iou, conf) pair, iou-major order.
std::vector<GridCell> f1_grid(std::span<const SceneEval> scenes, std::span<const double> iou_set,
                              std::span<const double> conf_set, const EvalOptions& options = {});

}  // namespace spectra
