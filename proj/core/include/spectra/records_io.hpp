#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spectra/annotate.hpp"
#include "spectra/matcheval.hpp"
#include "spectra/stats.hpp"
#include "spectra/synth.hpp"

namespace spectra {

// Scene annotations: one JSON object per line,
// {"scene_id", "extent": [x0,y0,x1,y1], "gt": [{"bbox": [...], "area_m2", "size_category"}]}.
std::string scene_to_json_line(const SceneRecord& scene);
SceneRecord scene_from_json_line(std::string_view line);
void write_scenes(const std::filesystem::path& path, std::span<const SceneRecord> scenes);
std::vector<SceneRecord> read_scenes(const std::filesystem::path& path);

// Detections: one JSON object per line, {"scene_id", "bbox": [...], "confidence"}.
std::string detection_to_json_line(const Detection& det);
Detection detection_from_json_line(std::string_view line);
void write_detections(const std::filesystem::path& path, std::span<const Detection> dets);
std::vector<Detection> read_detections(const std::filesystem::path& path);

/// Groups detections under their scene records. Scenes without detections
/// get an empty list; detections naming unknown scenes are returned in
/// `unknown_scene_ids` (sorted, unique) instead of being grouped.
struct Grouped {
  std::vector<SceneEval> scenes;
  std::vector<std::string> unknown_scene_ids;
};
Grouped group_detections(std::vector<SceneRecord> scenes, std::vector<Detection> dets);

// Split plan: {"seed", "k", "folds": [[scene_id, ...], ...]}.
std::string split_plan_to_json(const SplitPlan& plan);
SplitPlan split_plan_from_json(std::string_view text);

/// Fixed-precision decimal for CSV cells: at most four decimals, trailing
/// zeros trimmed, at least one digit after the point (0.6667, 1.0, 0.8).
std::string format_decimal(double v);

inline constexpr std::string_view kReportCsvHeader =
    "stratum_kind,stratum,iou,conf,tp,fp,fn,precision,recall,f1";

std::string report_to_json(const EvalReport& report);
/// Overall, five size strata and three density strata at the report's
/// thresholds. Overall rows use stratum "all".
std::string report_to_csv(const EvalReport& report);
/// One overall row plus five size rows per (iou, conf) cell.
std::string grid_to_csv(std::span<const GridCell> grid);

/// Fold scores CSV with header `condition,metric,fold,value`. Values are
/// ordered by fold number within each (condition, metric).
std::vector<FoldScores> read_fold_scores_csv(std::istream& in);
std::vector<FoldScores> read_fold_scores_csv(const std::filesystem::path& path);

/// Summaries per (condition, metric) and, per metric, a pairwise t-test
/// matrix over conditions.
std::string stats_to_json(std::span<const FoldScores> scores, VarianceMode mode);

SynthSpec synth_spec_from_json(std::string_view text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace spectra
