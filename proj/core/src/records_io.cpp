#include "spectra/records_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "spectra/error.hpp"

namespace spectra {
namespace {

using nlohmann::json;

json box_json(const BBox& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

BBox box_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw Error(ErrorCode::InvalidArgument, "bbox must have four numbers");
  BBox b{v[0], v[1], v[2], v[3]};
  if (!b.valid()) throw Error(ErrorCode::InvalidArgument, "bbox is not a valid box");
  return b;
}

template <typename Fn>
auto parse_guarded(std::string_view what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + ": " + e.what());
  }
}

template <typename T, typename Parse>
std::vector<T> read_lines(const std::filesystem::path& path, Parse&& parse) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const Error& e) {
      throw Error(e.code(), path.filename().string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

json counts_json(const Counts& c) {
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"fn", c.fn},
          {"precision", c.precision()},
          {"recall", c.recall()},
          {"f1", c.f1()}};
}

json sizes_json(const SizeCounts& sizes) {
  json out = json::object();
  for (const auto& [c, n] : sizes) out[std::string(to_string(c))] = counts_json(n);
  return out;
}

}  // namespace

std::string scene_to_json_line(const SceneRecord& scene) {
  json gt = json::array();
  for (const auto& a : scene.gt) {
    gt.push_back({{"bbox", box_json(a.bbox)},
                  {"area_m2", a.area_m2},
                  {"size_category", std::string(to_string(a.size))}});
  }
  const json j = {{"scene_id", scene.scene_id}, {"extent", box_json(scene.extent)}, {"gt", gt}};
  return j.dump();
}

SceneRecord scene_from_json_line(std::string_view line) {
  return parse_guarded("scene record", [&] {
    const auto j = json::parse(line);
    SceneRecord s;
    s.scene_id = j.at("scene_id").get<std::string>();
    s.extent = box_from(j.at("extent"));
    for (const auto& g : j.at("gt")) {
      Annotation a;
      a.scene_id = s.scene_id;
      a.bbox = box_from(g.at("bbox"));
      a.area_m2 = g.contains("area_m2") ? g.at("area_m2").get<double>() : a.bbox.area();
      a.size = size_category(a.area_m2);
      if (g.contains("size_category")) {
        const auto name = g.at("size_category").get<std::string>();
        const auto parsed = parse_size_category(name);
        if (!parsed) throw Error(ErrorCode::InvalidArgument, "unknown size category '" + name + "'");
        if (*parsed != a.size)
          throw Error(ErrorCode::InvalidArgument,
                      "size_category '" + name + "' disagrees with area_m2 " + std::to_string(a.area_m2));
      }
      s.gt.push_back(std::move(a));
    }
    return s;
  });
}

void write_scenes(const std::filesystem::path& path, std::span<const SceneRecord> scenes) {
  std::string text;
  for (const auto& s : scenes) text += scene_to_json_line(s) + '\n';
  write_text(path, text);
}

std::vector<SceneRecord> read_scenes(const std::filesystem::path& path) {
  return read_lines<SceneRecord>(path, scene_from_json_line);
}

std::string detection_to_json_line(const Detection& det) {
  const json j = {{"scene_id", det.scene_id}, {"bbox", box_json(det.bbox)}, {"confidence", det.confidence}};
  return j.dump();
}

Detection detection_from_json_line(std::string_view line) {
  return parse_guarded("detection", [&] {
    const auto j = json::parse(line);
    Detection d{j.at("scene_id").get<std::string>(), box_from(j.at("bbox")),
                j.at("confidence").get<double>()};
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "confidence outside [0, 1]");
    return d;
  });
}

void write_detections(const std::filesystem::path& path, std::span<const Detection> dets) {
  std::string text;
  for (const auto& d : dets) text += detection_to_json_line(d) + '\n';
  write_text(path, text);
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
  return read_lines<Detection>(path, detection_from_json_line);
}

Grouped group_detections(std::vector<SceneRecord> scenes, std::vector<Detection> dets) {
  Grouped g;
  std::map<std::string, std::size_t> index;
  for (auto& s : scenes) {
    const auto id = s.scene_id;
    if (!index.emplace(id, g.scenes.size()).second)
      throw Error(ErrorCode::DuplicateScene, "scene '" + id + "' appears more than once");
    g.scenes.push_back({std::move(s), {}});
  }
  std::set<std::string> unknown;
  for (auto& d : dets) {
    const auto it = index.find(d.scene_id);
    if (it == index.end()) {
      unknown.insert(d.scene_id);
    } else {
      g.scenes[it->second].detections.push_back(std::move(d));
    }
  }
  g.unknown_scene_ids.assign(unknown.begin(), unknown.end());
  return g;
}

std::string split_plan_to_json(const SplitPlan& plan) {
  const json j = {{"seed", plan.seed}, {"k", plan.k()}, {"folds", plan.folds}};
  return j.dump(2) + '\n';
}

SplitPlan split_plan_from_json(std::string_view text) {
  return parse_guarded("split plan", [&] {
    const auto j = json::parse(text);
    SplitPlan plan;
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.folds = j.at("folds").get<std::vector<std::vector<std::string>>>();
    if (j.contains("k") && j.at("k").get<std::size_t>() != plan.folds.size())
      throw Error(ErrorCode::InvalidArgument, "k does not match the number of folds");
    std::set<std::string> seen;
    for (const auto& fold : plan.folds) {
      for (const auto& id : fold) {
        if (!seen.insert(id).second)
          throw Error(ErrorCode::InvalidArgument, "scene '" + id + "' appears in two folds");
      }
    }
    return plan;
  });
}

std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
  if (s == "-0.0") s = "0.0";
  return s;
}

std::string report_to_json(const EvalReport& r) {
  json by_density = json::object();
  for (const auto& [c, n] : r.by_density) by_density[std::string(to_string(c))] = counts_json(n);
  json grid = json::array();
  for (const auto& cell : r.grid) {
    grid.push_back({{"iou", cell.iou},
                    {"conf", cell.conf},
                    {"overall", counts_json(cell.overall)},
                    {"by_size", sizes_json(cell.by_size)}});
  }
  const json j = {{"iou", r.iou_thresh},
                  {"conf", r.conf_thresh},
                  {"overall", counts_json(r.overall)},
                  {"by_size", sizes_json(r.by_size)},
                  {"by_density", by_density},
                  {"grid", grid}};
  return j.dump(2) + '\n';
}

namespace {

void csv_row(std::string& out, std::string_view kind, std::string_view stratum, double iou_t,
             double conf_t, const Counts& c) {
  out += kind;
  out += ',';
  out += stratum;
  out += ',' + format_decimal(iou_t) + ',' + format_decimal(conf_t) + ',' + std::to_string(c.tp) +
         ',' + std::to_string(c.fp) + ',' + std::to_string(c.fn) + ',' + format_decimal(c.precision()) +
         ',' + format_decimal(c.recall()) + ',' + format_decimal(c.f1()) + '\n';
}

}  // namespace

std::string report_to_csv(const EvalReport& r) {
  std::string out(kReportCsvHeader);
  out += '\n';
  csv_row(out, "overall", "all", r.iou_thresh, r.conf_thresh, r.overall);
  for (const auto& [c, n] : r.by_size) csv_row(out, "size", to_string(c), r.iou_thresh, r.conf_thresh, n);
  for (const auto& [c, n] : r.by_density)
    csv_row(out, "density", to_string(c), r.iou_thresh, r.conf_thresh, n);
  return out;
}

std::string grid_to_csv(std::span<const GridCell> grid) {
  std::string out(kReportCsvHeader);
  out += '\n';
  for (const auto& cell : grid) {
    csv_row(out, "overall", "all", cell.iou, cell.conf, cell.overall);
    for (const auto& [c, n] : cell.by_size) csv_row(out, "size", to_string(c), cell.iou, cell.conf, n);
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return cells;
}

}  // namespace

std::vector<FoldScores> read_fold_scores_csv(std::istream& in) {
  std::map<std::pair<std::string, Metric>, std::map<long, double>> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cells = split_csv(line);
    if (cells.empty() || (cells.size() == 1 && cells[0].empty())) continue;
    if (lineno == 1 && cells[0] == "condition") continue;
    const auto where = "line " + std::to_string(lineno);
    if (cells.size() != 4) throw Error(ErrorCode::InvalidArgument, where + ": expected 4 columns");
    long fold = 0;
    double value = 0.0;
    try {
      std::size_t used = 0;
      fold = std::stol(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("fold");
      value = std::stod(cells[3], &used);
      if (used != cells[3].size()) throw std::invalid_argument("value");
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument, where + ": fold must be an integer and value a number");
    }
    Metric metric = parse_metric(cells[1]);
    if (!table[{cells[0], metric}].emplace(fold, value).second)
      throw Error(ErrorCode::InvalidArgument, where + ": duplicate fold " + cells[2]);
  }
  std::vector<FoldScores> out;
  for (const auto& [key, folds] : table) {
    FoldScores f{key.first, key.second, {}};
    for (const auto& [fold, value] : folds) f.values.push_back(value);
    f.validate();
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<FoldScores> read_fold_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_fold_scores_csv(in);
}

std::string stats_to_json(std::span<const FoldScores> scores, VarianceMode mode) {
  json summaries = json::array();
  std::map<Metric, std::vector<const FoldScores*>> by_metric;
  for (const auto& f : scores) {
    const auto s = summarize(f);
    summaries.push_back({{"condition", f.condition},
                         {"metric", std::string(to_string(f.metric))},
                         {"n", f.values.size()},
                         {"mean", s.mean},
                         {"sample_std", s.sample_std},
                         {"errbar", s.errbar}});
    by_metric[f.metric].push_back(&f);
  }
  json tests = json::object();
  for (const auto& [metric, group] : by_metric) {
    json names = json::array(), t = json::array(), df = json::array(), p = json::array();
    for (const auto* a : group) {
      names.push_back(a->condition);
      json trow = json::array(), dfrow = json::array(), prow = json::array();
      for (const auto* b : group) {
        try {
          const auto r = ttest_unpaired(*a, *b, mode);
          trow.push_back(r.t);
          dfrow.push_back(r.df);
          prow.push_back(r.p_two_tailed);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateVariance) throw;
          trow.push_back(nullptr);
          dfrow.push_back(nullptr);
          prow.push_back(nullptr);
        }
      }
      t.push_back(trow);
      df.push_back(dfrow);
      p.push_back(prow);
    }
    tests[std::string(to_string(metric))] = {{"conditions", names}, {"t", t}, {"df", df}, {"p_two_tailed", p}};
  }
  const json j = {{"test", mode == VarianceMode::Pooled ? "pooled" : "welch"},
                  {"summaries", summaries},
                  {"ttests", tests}};
  return j.dump(2) + '\n';
}

SynthSpec synth_spec_from_json(std::string_view text) {
  return parse_guarded("synth spec", [&] {
    const auto j = json::parse(text);
    SynthSpec s;
    if (!j.contains("seed")) throw Error(ErrorCode::InvalidArgument, "synth spec requires an explicit seed");
    s.seed = j.at("seed").get<std::uint64_t>();
    s.n_scenes = j.value("n_scenes", std::size_t{1});
    if (j.contains("density")) {
      const auto& d = j.at("density");
      if (d.is_number_integer()) {
        s.buildings_per_scene = d.get<std::size_t>();
      } else {
        const auto name = d.get<std::string>();
        s.density = parse_density_category(name);
        if (!s.density) throw Error(ErrorCode::InvalidArgument, "unknown density '" + name + "'");
      }
    }
    if (j.contains("buildings_per_scene")) s.buildings_per_scene = j.at("buildings_per_scene").get<std::size_t>();
    if (j.contains("size_mix")) {
      const auto mix = j.at("size_mix").get<std::vector<double>>();
      if (mix.size() != 5) throw Error(ErrorCode::InvalidArgument, "size_mix needs five weights");
      std::copy(mix.begin(), mix.end(), s.size_mix.begin());
    }
    if (j.contains("detector")) {
      const auto& d = j.at("detector");
      if (d.is_string()) {
        if (d.get<std::string>() != "perfect")
          throw Error(ErrorCode::InvalidArgument, "detector must be \"perfect\" or an object");
      } else {
        s.detector.jitter_sigma_m = d.value("jitter_sigma_m", 0.0);
        s.detector.dropout_rate = d.value("dropout_rate", 0.0);
        s.detector.spurious_rate = d.value("spurious_rate", 0.0);
        s.detector.confidence_min = d.value("confidence_min", 1.0);
        s.detector.confidence_max = d.value("confidence_max", 1.0);
      }
    }
    s.extent_m = j.value("extent_m", 210.0);
    s.max_attempts = j.value("max_attempts", std::size_t{10000});
    s.validate();
    return s;
  });
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

}  // namespace spectra
