#include "spectra/matcheval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spectra/error.hpp"
#include "spectra/parallel.hpp"

namespace spectra {
namespace {

void check_threshold(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must lie in [0, 1]");
}

void check_scene_ids(std::span<const Annotation> gt, std::span<const Detection> dets) {
  const std::string* first = nullptr;
  const auto check = [&](const std::string& id) {
    if (!first) {
      first = &id;
    } else if (*first != id) {
      throw Error(ErrorCode::SceneMismatch, "items from scenes '" + *first + "' and '" + id +
                                                "' passed to one match call");
    }
  };
  for (const auto& g : gt) check(g.scene_id);
  for (const auto& d : dets) check(d.scene_id);
}

}  // namespace

MatchOutcome match(std::span<const Annotation> gt, std::span<const Detection> dets,
                   double iou_thresh, double conf_thresh) {
  check_threshold(iou_thresh, "iou threshold");
  check_threshold(conf_thresh, "confidence threshold");
  check_scene_ids(gt, dets);
  for (const auto& d : dets) {
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "detection confidence outside [0, 1]");
    if (!d.bbox.valid()) throw Error(ErrorCode::InvalidArgument, "detection box is not valid");
  }

  std::vector<std::size_t> order;
  order.reserve(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].confidence >= conf_thresh) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });

  MatchOutcome out;
  std::vector<bool> taken(gt.size(), false);
  for (const auto d : order) {
    double best_iou = 0.0;
    std::size_t best = gt.size();
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(dets[d].bbox, gt[g].bbox);
      if (v > best_iou) {
        best_iou = v;
        best = g;
      }
    }
    if (best < gt.size() && best_iou >= iou_thresh) {
      taken[best] = true;
      out.true_positives.push_back({d, best, best_iou});
    } else {
      out.false_positives.push_back({d, size_category(dets[d].bbox.area())});
    }
  }
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!taken[g]) out.false_negatives.push_back(g);
  }
  return out;
}

double f1_score(double precision, double recall) noexcept {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

double Counts::precision() const noexcept {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Counts::recall() const noexcept {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double Counts::f1() const noexcept { return f1_score(precision(), recall()); }

SceneTally tally(const MatchOutcome& outcome, std::span<const Annotation> gt) {
  SceneTally t;
  t.overall = {outcome.true_positives.size(), outcome.false_positives.size(),
               outcome.false_negatives.size()};
  for (const auto& tp : outcome.true_positives) ++t.by_size[gt[tp.gt].size].tp;
  for (const auto& fp : outcome.false_positives) ++t.by_size[fp.size].fp;
  for (const auto g : outcome.false_negatives) ++t.by_size[gt[g].size].fn;
  return t;
}

namespace {

/// Scene indices sorted by id; throws on duplicates and on detections that
/// name a different scene than their record.
std::vector<std::size_t> scene_order(std::span<const SceneEval> scenes) {
  std::vector<std::size_t> order(scenes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scenes[a].scene.scene_id < scenes[b].scene.scene_id;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (scenes[order[i]].scene.scene_id == scenes[order[i - 1]].scene.scene_id)
      throw Error(ErrorCode::DuplicateScene, "scene '" + scenes[order[i]].scene.scene_id +
                                                 "' appears more than once");
  }
  for (const auto& s : scenes) {
    for (const auto& d : s.detections) {
      if (d.scene_id != s.scene.scene_id)
        throw Error(ErrorCode::SceneMismatch, "detection for '" + d.scene_id +
                                                  "' grouped under scene '" + s.scene.scene_id + "'");
    }
  }
  return order;
}

std::vector<SceneTally> tally_all(std::span<const SceneEval> scenes, double iou_thresh,
                                  double conf_thresh, std::size_t jobs) {
  std::vector<SceneTally> tallies(scenes.size());
  parallel_for(scenes.size(), jobs, [&](std::size_t i) {
    const auto& s = scenes[i];
    tallies[i] = tally(match(s.scene.gt, s.detections, iou_thresh, conf_thresh), s.scene.gt);
  });
  return tallies;
}

SizeCounts reported_sizes(const SizeCounts& all) {
  SizeCounts out;
  for (auto c : kReportedSizes) {
    const auto it = all.find(c);
    out[c] = it == all.end() ? Counts{} : it->second;
  }
  return out;
}

}  // namespace

EvalReport report(std::span<const SceneEval> scenes, double iou_thresh, double conf_thresh,
                  const EvalOptions& options) {
  check_threshold(iou_thresh, "iou threshold");
  check_threshold(conf_thresh, "confidence threshold");
  const auto order = scene_order(scenes);
  const auto tallies = tally_all(scenes, iou_thresh, conf_thresh, options.jobs);

  EvalReport r;
  r.iou_thresh = iou_thresh;
  r.conf_thresh = conf_thresh;
  SizeCounts sizes;
  for (auto c : kDensities) r.by_density[c] = {};
  for (const auto i : order) {
    const auto& t = tallies[i];
    r.overall += t.overall;
    for (const auto& [c, n] : t.by_size) sizes[c] += n;
    r.by_density[scenes[i].scene.density()] += t.overall;
  }
  r.by_size = reported_sizes(sizes);
  return r;
}

std::vector<GridCell> f1_grid(std::span<const SceneEval> scenes, std::span<const double> iou_set,
                              std::span<const double> conf_set, const EvalOptions& options) {
  if (iou_set.empty() || conf_set.empty())
    throw Error(ErrorCode::InvalidArgument, "threshold sets must be non-empty");
  for (double v : iou_set) check_threshold(v, "iou threshold");
  for (double v : conf_set) check_threshold(v, "confidence threshold");
  const auto order = scene_order(scenes);

  std::vector<GridCell> grid;
  for (double iou_t : iou_set) {
    for (double conf_t : conf_set) {
      const auto tallies = tally_all(scenes, iou_t, conf_t, options.jobs);
      GridCell cell{iou_t, conf_t, {}, {}};
      SizeCounts sizes;
      for (const auto i : order) {
        cell.overall += tallies[i].overall;
        for (const auto& [c, n] : tallies[i].by_size) sizes[c] += n;
      }
      cell.by_size = reported_sizes(sizes);
      grid.push_back(std::move(cell));
    }
  }
  return grid;
}

}  // namespace spectra
