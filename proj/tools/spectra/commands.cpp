#include "spectra/commands.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "spectra/annotate.hpp"
#include "spectra/error.hpp"
#include "spectra/geojson.hpp"
#include "spectra/matcheval.hpp"
#include "spectra/netexpand.hpp"
#include "spectra/plot.hpp"
#include "spectra/raster.hpp"
#include "spectra/records_io.hpp"
#include "spectra/stats.hpp"
#include "spectra/synth.hpp"
#include "spectra/tiff.hpp"

namespace spectra::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

/// Input problem detected by the CLI itself (maps to exit code 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("spectra", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SPECTRA_EVAL_LOG"); env && *env) {
    const auto lvl = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only honour it when asked for.
    if (lvl != spdlog::level::off || std::string_view(env) == "off") log->set_level(lvl);
  }
  return log;
}

void emit(const std::optional<fs::path>& path, std::string_view payload, std::ostream& out) {
  if (path) {
    if (path->has_parent_path()) fs::create_directories(path->parent_path());
    write_text(*path, payload);
  } else {
    out << payload;
  }
}

void check_unit(const std::vector<double>& values, const char* flag) {
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError(std::string(flag) + " values must lie in [0, 1]");
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : sep) + i;
  return s;
}

PadMode parse_pad_mode(const std::string& s) {
  if (s == "per_side") return PadMode::PerSide;
  if (s == "total") return PadMode::Total;
  throw UsageError("--pad-mode must be per_side or total");
}

// ---------------------------------------------------------------- prepare

struct PrepareArgs {
  fs::path geojson_dir;
  std::optional<fs::path> raster_dir;
  fs::path out;
  std::optional<fs::path> stats;
  double pad = 6.0;
  std::string pad_mode = "per_side";
  double min_area = 25.0;
  std::optional<double> gsd;
};

std::optional<fs::path> find_raster(const std::optional<fs::path>& dir, const std::string& stem) {
  if (!dir) return std::nullopt;
  for (const char* ext : {".tif", ".tiff", ".TIF"}) {
    const auto p = *dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

BBox footprint_bounds(const FootprintSet& set) {
  BBox b{INFINITY, INFINITY, -INFINITY, -INFINITY};
  for (const auto& ring : set.rings)
    for (const auto& p : ring) {
      b.x_min = std::min(b.x_min, p.x);
      b.y_min = std::min(b.y_min, p.y);
      b.x_max = std::max(b.x_max, p.x);
      b.y_max = std::max(b.y_max, p.y);
    }
  return b;
}

int cmd_prepare(const PrepareArgs& a, std::ostream& out, spdlog::logger& log) {
  if (!fs::is_directory(a.geojson_dir)) throw UsageError("not a directory: " + a.geojson_dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.geojson_dir))
    if (e.is_regular_file() && (e.path().extension() == ".geojson" || e.path().extension() == ".json"))
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no scenes found in " + a.geojson_dir.string());

  const PadOptions pad{a.min_area, a.pad, parse_pad_mode(a.pad_mode)};
  std::vector<SceneRecord> scenes;
  std::size_t total = 0, discarded = 0, degenerate = 0;
  std::map<SizeCategory, std::size_t> sizes;
  std::map<DensityCategory, std::size_t> densities;
  for (auto c : kReportedSizes) sizes[c] = 0;
  for (auto c : kDensities) densities[c] = 0;

  for (const auto& file : files) {
    const std::string id = file.stem().string();
    auto set = read_footprints(file);
    std::optional<tiff::Info> info;
    if (const auto raster = find_raster(a.raster_dir, id)) info = tiff::read_info(*raster);

    double gsd_x = a.gsd.value_or(1.0), gsd_y = gsd_x;
    if (info && info->pixel_scale) {
      gsd_x = (*info->pixel_scale)[0];
      gsd_y = (*info->pixel_scale)[1];
    }
    if (set.crs_mode == CrsMode::Pixels) {
      if (!a.gsd && !(info && info->pixel_scale))
        throw UsageError(file.filename().string() + ": pixel coordinates need --gsd or a georeferenced raster");
      set = to_meters(std::move(set), gsd_x, gsd_y);
    }

    BBox extent;
    if (set.extent) {
      extent = *set.extent;
    } else if (info) {
      extent = {0, 0, static_cast<double>(info->width) * gsd_x, static_cast<double>(info->height) * gsd_y};
    } else if (!set.rings.empty()) {
      extent = footprint_bounds(set);
      log.warn("{}: no extent or raster, using the footprint bounds", id);
    } else {
      log.warn("{}: empty scene without extent skipped", id);
      continue;
    }
    if (!extent.valid()) throw UsageError(id + ": scene extent is empty");

    auto prepared = prepare_scene(id, set, extent, pad);
    total += prepared.total;
    discarded += prepared.discarded;
    degenerate += prepared.degenerate;
    for (const auto& g : prepared.record.gt) ++sizes[g.size];
    ++densities[prepared.record.density()];
    log.debug("{}: {} footprints, {} kept", id, prepared.total, prepared.record.gt.size());
    scenes.push_back(std::move(prepared.record));
  }
  if (scenes.empty()) throw UsageError("no scenes found in " + a.geojson_dir.string());

  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  write_scenes(a.out, scenes);

  const std::size_t kept = total - discarded;
  const double frac = total ? static_cast<double>(discarded) / static_cast<double>(total) : 0.0;
  json size_hist = json::object(), density_hist = json::object();
  for (auto c : kReportedSizes) size_hist[std::string(to_string(c))] = sizes[c];
  for (auto c : kDensities) density_hist[std::string(to_string(c))] = densities[c];
  const json stats = {{"scenes", scenes.size()},
                      {"total", total},
                      {"discarded", discarded},
                      {"degenerate", degenerate},
                      {"kept", kept},
                      {"discard_fraction", frac},
                      {"min_area_m2", a.min_area},
                      {"pad_m", a.pad},
                      {"pad_mode", a.pad_mode},
                      {"size_histogram", size_hist},
                      {"density_histogram", density_hist}};
  if (a.stats) emit(a.stats, stats.dump(2) + "\n", out);

  out << "scenes " << scenes.size() << "\n"
      << "boxes total " << total << ", discarded " << discarded << " (" << format_decimal(100.0 * frac)
      << "%), kept " << kept << "\n";
  for (auto c : kReportedSizes) out << "  " << to_string(c) << " " << sizes[c] << "\n";
  return kOk;
}

// --------------------------------------------------------------- evaluate

struct EvaluateArgs {
  fs::path gt;
  fs::path det;
  std::vector<double> iou;
  std::vector<double> conf;
  bool grid = false;
  std::size_t jobs = 1;
  std::string format = "json";
  std::optional<fs::path> out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err, spdlog::logger& log) {
  check_unit(a.iou, "--iou");
  check_unit(a.conf, "--conf");
  if (a.format != "json" && a.format != "csv") throw UsageError("evaluate --format must be json or csv");
  if (!a.grid && (a.iou.size() > 1 || a.conf.size() > 1))
    throw UsageError("several --iou/--conf values need --grid");

  auto grouped = group_detections(read_scenes(a.gt), read_detections(a.det));
  if (!grouped.unknown_scene_ids.empty()) {
    err << "detections reference scene ids missing from the ground truth: "
        << join(grouped.unknown_scene_ids, ", ") << "\n";
    return kInputError;
  }
  if (grouped.scenes.empty()) throw UsageError("no scenes found in " + a.gt.string());
  log.info("evaluating {} scenes", grouped.scenes.size());

  const EvalOptions opts{a.jobs};
  const double iou = a.iou.size() == 1 ? a.iou[0] : 0.5;
  const double conf = a.conf.size() == 1 ? a.conf[0] : 0.5;
  auto r = report(grouped.scenes, iou, conf, opts);
  if (a.grid) {
    const std::vector<double> ious = a.iou.empty() ? std::vector<double>(kDefaultGridIou.begin(), kDefaultGridIou.end()) : a.iou;
    const std::vector<double> confs =
        a.conf.empty() ? std::vector<double>(kDefaultGridConf.begin(), kDefaultGridConf.end()) : a.conf;
    r.grid = f1_grid(grouped.scenes, ious, confs, opts);
  }

  std::string payload;
  if (a.format == "csv") {
    payload = a.grid ? grid_to_csv(r.grid) : report_to_csv(r);
  } else {
    payload = report_to_json(r);
  }
  emit(a.out, payload, out);
  if (a.out) {
    out << "precision " << format_decimal(r.overall.precision()) << ", recall "
        << format_decimal(r.overall.recall()) << ", f1 " << format_decimal(r.overall.f1()) << " at iou "
        << format_decimal(iou) << ", conf " << format_decimal(conf) << "\n";
  }
  return kOk;
}

// ------------------------------------------------------------------ stats

int cmd_stats(const fs::path& folds, const std::string& test, const std::optional<fs::path>& dest,
              std::ostream& out) {
  VarianceMode mode;
  if (test == "pooled") mode = VarianceMode::Pooled;
  else if (test == "welch") mode = VarianceMode::Welch;
  else throw UsageError("--test must be pooled or welch");
  const auto scores = read_fold_scores_csv(folds);
  if (scores.empty()) throw UsageError("no fold scores in " + folds.string());
  for (const auto& s : scores) s.validate();
  emit(dest, stats_to_json(scores, mode), out);
  return kOk;
}

// ----------------------------------------------------------------- expand

struct ExpandArgs {
  fs::path weights;
  fs::path bands;
  std::string strategy = "replicate_nearest";
  std::string scale = "none";
  std::optional<std::uint64_t> seed;
  fs::path out;
};

int cmd_expand(const ExpandArgs& a, std::ostream& out) {
  ExpansionSpec spec;
  if (a.strategy == "random") spec.strategy = ExpansionStrategy::Random;
  else if (a.strategy == "replicate_cyclic") spec.strategy = ExpansionStrategy::ReplicateCyclic;
  else if (a.strategy == "replicate_nearest") spec.strategy = ExpansionStrategy::ReplicateNearestWavelength;
  else throw UsageError("--strategy must be random, replicate_cyclic or replicate_nearest");
  if (a.scale == "none") spec.scale = ScaleMode::None;
  else if (a.scale == "divide_by_multiplicity") spec.scale = ScaleMode::DivideByMultiplicity;
  else throw UsageError("--scale must be none or divide_by_multiplicity");
  if (spec.strategy == ExpansionStrategy::Random) {
    if (!a.seed) throw UsageError("--seed is required for the random strategy");
    spec.seed = *a.seed;
  }
  spec.target_bands = read_band_sidecar(a.bands);
  const auto w = read_tensor(a.weights);
  const auto expanded = expand(w, spec);
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  write_tensor(expanded, a.out);
  const auto& s = expanded.shape();
  out << "wrote " << a.out.string() << " dims " << s[0] << "," << s[1] << "," << s[2] << "," << s[3] << "\n";
  return kOk;
}

// ------------------------------------------------------------------ synth

int cmd_synth(const fs::path& spec_path, std::optional<std::uint64_t> seed, const fs::path& out_dir,
              std::size_t jobs, std::ostream& out) {
  auto doc = json::parse(read_text(spec_path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw UsageError(spec_path.string() + " is not a JSON object");
  if (seed) doc["seed"] = *seed;
  const auto spec = synth_spec_from_json(doc.dump());
  const auto scenes = generate(spec, jobs);
  std::vector<SceneRecord> records;
  std::vector<Detection> dets;
  for (const auto& s : scenes) {
    records.push_back(s.scene);
    dets.insert(dets.end(), s.detections.begin(), s.detections.end());
  }
  fs::create_directories(out_dir);
  write_scenes(out_dir / "gt.jsonl", records);
  write_detections(out_dir / "det.jsonl", dets);
  std::size_t boxes = 0;
  for (const auto& r : records) boxes += r.gt.size();
  out << "scenes " << records.size() << ", ground truth " << boxes << ", detections " << dets.size() << "\n";
  return kOk;
}

// ------------------------------------------------------------------ split

int cmd_split(const fs::path& gt, std::optional<std::size_t> kfold, std::optional<double> holdout,
              std::uint64_t seed, const std::optional<fs::path>& dest, std::ostream& out) {
  if (kfold.has_value() == holdout.has_value()) throw UsageError("give exactly one of --kfold or --holdout");
  std::vector<std::string> ids;
  for (const auto& s : read_scenes(gt)) ids.push_back(s.scene_id);
  const auto plan = kfold ? make_splits(ids, KFoldSplit{*kfold}, seed) : make_splits(ids, HoldoutSplit{*holdout}, seed);
  emit(dest, split_plan_to_json(plan), out);
  return kOk;
}

// ------------------------------------------------------------------- plot

std::vector<BarSeries> charts_from(const json& doc) {
  std::vector<BarSeries> charts;
  if (doc.contains("size_histogram")) {
    BarSeries size{"building size", "buildings", {}}, density{"scene density", "scenes", {}};
    for (auto c : kReportedSizes)
      size.bars.emplace_back(std::string(to_string(c)), doc.at("size_histogram").value(std::string(to_string(c)), 0.0));
    for (auto c : kDensities)
      density.bars.emplace_back(std::string(to_string(c)),
                                doc.at("density_histogram").value(std::string(to_string(c)), 0.0));
    charts.push_back(std::move(size));
    charts.push_back(std::move(density));
  } else if (doc.contains("by_size") && doc.contains("overall")) {
    BarSeries size{"f1 by building size", "f1", {}}, density{"f1 by scene density", "f1", {}};
    for (auto c : kReportedSizes) size.bars.emplace_back(std::string(to_string(c)), doc.at("by_size").at(std::string(to_string(c))).at("f1").get<double>());
    for (auto c : kDensities)
      density.bars.emplace_back(std::string(to_string(c)), doc.at("by_density").at(std::string(to_string(c))).at("f1").get<double>());
    charts.push_back(std::move(size));
    charts.push_back(std::move(density));
  } else {
    throw UsageError("plot input must be prepare statistics or an evaluation report");
  }
  return charts;
}

int cmd_plot(const fs::path& input, const std::string& format, const std::optional<fs::path>& dest,
             std::ostream& out) {
  const auto doc = json::parse(read_text(input), nullptr, false);
  if (doc.is_discarded()) throw UsageError(input.string() + " is not valid JSON");
  std::vector<BarSeries> charts;
  try {
    charts = charts_from(doc);
  } catch (const json::exception& e) {
    throw UsageError(input.string() + ": " + e.what());
  }
  if (format == "svg") emit(dest, bars_to_svg(charts), out);
  else if (format == "csv") emit(dest, bars_to_csv(charts), out);
  else throw UsageError("plot --format must be svg or csv");
  return kOk;
}

// ----------------------------------------------------------------- raster

struct RasterArgs {
  fs::path input;
  std::optional<fs::path> out;
  std::vector<double> select;
  std::optional<int> bits;
  bool stretch = false;
  std::size_t factor = 1;
  std::string method = "bilinear";
  double gsd = 1.0;
};

int cmd_raster(const RasterArgs& a, std::ostream& out) {
  LoadOptions opts;
  opts.default_gsd = a.gsd;
  auto img = load_scene(a.input, opts);
  if (!a.select.empty()) img = compose_bands(img, a.select);
  if (a.bits) img = a.stretch ? requantize_percentile(img, *a.bits) : requantize(img, *a.bits);
  if (a.factor != 1) {
    ResampleMethod m;
    if (a.method == "bilinear") m = ResampleMethod::Bilinear;
    else if (a.method == "nearest") m = ResampleMethod::Nearest;
    else throw UsageError("--method must be bilinear or nearest");
    img = rescale(img, a.factor, m);
  }
  out << img.width() << "x" << img.height() << " bands " << img.band_count() << " bit_depth " << img.bit_depth()
      << " gsd " << format_decimal(img.gsd_x()) << "," << format_decimal(img.gsd_y()) << "\n";
  for (const auto& b : img.bands()) out << "  " << b.name << " " << format_decimal(b.center_wavelength_nm) << " nm\n";
  if (a.out) {
    if (a.out->has_parent_path()) fs::create_directories(a.out->parent_path());
    tiff::write(*a.out, img.width(), img.height(), img.band_count(), img.bit_depth() <= 8 ? 8 : 16, img.pixels(),
                std::array<double, 2>{img.gsd_x(), img.gsd_y()});
    write_band_sidecar(band_sidecar_path(*a.out), img.bands());
  }
  return kOk;
}

// ---------------------------------------------------------------- patches

int cmd_patches(const fs::path& gt, const fs::path& raster_dir, std::uint64_t seed, const fs::path& out_dir,
                std::ostream& out, spdlog::logger& log) {
  fs::create_directories(out_dir);
  std::string index;
  std::size_t pos = 0, neg = 0, scenes = 0;
  for (const auto& scene : read_scenes(gt)) {
    const auto raster = find_raster(raster_dir, scene.scene_id);
    if (!raster) {
      log.warn("{}: no raster, skipped", scene.scene_id);
      continue;
    }
    const auto img = load_scene(*raster);
    std::vector<Patch> patches;
    try {
      patches = extract_patches(scene, img, seed);
    } catch (const NegativeSamplingExhausted& e) {
      throw UsageError(scene.scene_id + ": found only " + std::to_string(e.produced()) + " of " +
                       std::to_string(e.needed()) + " building-free patches");
    }
    ++scenes;
    std::size_t k = 0;
    for (const auto& p : patches) {
      const bool building = p.label == PatchLabel::Building;
      char name[64];
      std::snprintf(name, sizeof name, "_%s_%04zu.tif", building ? "pos" : "neg", k++);
      const auto file = scene.scene_id + name;
      tiff::write(out_dir / file, p.raster.width(), p.raster.height(), p.raster.band_count(),
                  p.raster.bit_depth() <= 8 ? 8 : 16, p.raster.pixels(),
                  std::array<double, 2>{p.raster.gsd_x(), p.raster.gsd_y()});
      const json line = {{"scene_id", scene.scene_id},
                         {"file", file},
                         {"label", building ? "building" : "not_building"},
                         {"bbox", {p.box.x_min, p.box.y_min, p.box.x_max, p.box.y_max}}};
      index += line.dump() + "\n";
      (building ? pos : neg)++;
    }
  }
  write_text(out_dir / "patches.jsonl", index);
  out << "scenes " << scenes << ", building patches " << pos << ", background patches " << neg << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Building-detection data preparation, scoring and statistics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "spectra 0.3.0");

  PrepareArgs prep;
  auto* prepare = app.add_subcommand("prepare", "GeoJSON footprints -> padded annotation JSONL");
  prepare->add_option("geojson_dir", prep.geojson_dir, "Directory of per-scene GeoJSON files")->required();
  prepare->add_option("--raster-dir", prep.raster_dir, "Rasters named <scene>.tif, used for extent and GSD");
  prepare->add_option("--out", prep.out, "Annotation JSONL to write")->required();
  prepare->add_option("--stats", prep.stats, "Write counts and histograms as JSON");
  prepare->add_option("--pad", prep.pad, "Padding in meters")->capture_default_str();
  prepare->add_option("--pad-mode", prep.pad_mode, "per_side or total")->capture_default_str();
  prepare->add_option("--min-area", prep.min_area, "Discard boxes below this area (m^2)")->capture_default_str();
  prepare->add_option("--gsd", prep.gsd, "Meters per pixel for pixel-unit footprints");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Match detections to ground truth and report P/R/F1");
  evaluate->add_option("gt", ev.gt, "Annotation JSONL")->required();
  evaluate->add_option("det", ev.det, "Detection JSONL")->required();
  evaluate->add_option("--iou", ev.iou, "IoU threshold (repeatable with --grid)");
  evaluate->add_option("--conf", ev.conf, "Confidence threshold (repeatable with --grid)");
  evaluate->add_flag("--grid", ev.grid, "Per-size F1 over an IoU x confidence grid");
  evaluate->add_option("--jobs", ev.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  evaluate->add_option("--format", ev.format, "json or csv")->capture_default_str();
  evaluate->add_option("--out", ev.out, "Output file (default stdout)");

  fs::path folds;
  std::string test = "pooled";
  std::optional<fs::path> stats_out;
  auto* stats = app.add_subcommand("stats", "Fold summaries and pairwise unpaired t-tests");
  stats->add_option("folds", folds, "CSV: condition,metric,fold,value")->required();
  stats->add_option("--test", test, "pooled or welch")->capture_default_str();
  stats->add_option("--out", stats_out, "Output JSON (default stdout)");

  ExpandArgs ex;
  auto* expand_cmd = app.add_subcommand("expand", "Widen a 3-channel first-layer kernel to N bands");
  expand_cmd->add_option("weights", ex.weights, "Source .wtns tensor")->required();
  expand_cmd->add_option("bands", ex.bands, "Target bands JSON: [{name, wavelength_nm}]")->required();
  expand_cmd->add_option("--strategy", ex.strategy, "random, replicate_cyclic or replicate_nearest")
      ->capture_default_str();
  expand_cmd->add_option("--scale", ex.scale, "none or divide_by_multiplicity")->capture_default_str();
  expand_cmd->add_option("--seed", ex.seed, "Seed for the random strategy");
  expand_cmd->add_option("--out", ex.out, "Output .wtns")->required();

  fs::path synth_spec, synth_dir;
  std::optional<std::uint64_t> synth_seed;
  std::size_t synth_jobs = 1;
  auto* synth = app.add_subcommand("synth", "Synthetic scenes and mock detections");
  synth->add_option("spec", synth_spec, "Synthetic spec JSON")->required();
  synth->add_option("--seed", synth_seed, "Overrides the seed in the spec");
  synth->add_option("--out-dir", synth_dir, "Writes gt.jsonl and det.jsonl here")->required();
  synth->add_option("--jobs", synth_jobs, "Worker threads (0 = all cores)")->capture_default_str();

  fs::path split_gt;
  std::optional<std::size_t> kfold;
  std::optional<double> holdout;
  std::uint64_t split_seed = 0;
  std::optional<fs::path> split_out;
  auto* split = app.add_subcommand("split", "Seeded train/test or k-fold scene splits");
  split->add_option("gt", split_gt, "Annotation JSONL listing the scenes")->required();
  split->add_option("--kfold", kfold, "Number of folds");
  split->add_option("--holdout", holdout, "Training fraction, e.g. 0.8");
  split->add_option("--seed", split_seed, "Shuffle seed")->required();
  split->add_option("--out", split_out, "Output JSON (default stdout)");

  fs::path plot_in;
  std::string plot_format = "svg";
  std::optional<fs::path> plot_out;
  auto* plot = app.add_subcommand("plot", "Bar charts from prepare statistics or an evaluation report");
  plot->add_option("input", plot_in, "JSON from prepare --stats or evaluate")->required();
  plot->add_option("--format", plot_format, "svg or csv")->capture_default_str();
  plot->add_option("--out", plot_out, "Output file (default stdout)");

  RasterArgs ra;
  auto* raster = app.add_subcommand("raster", "Inspect or convert a multi-band TIFF");
  raster->add_option("input", ra.input, "TIFF scene")->required();
  raster->add_option("--select", ra.select, "Band wavelengths to keep, in order (nm)")->delimiter(',');
  raster->add_option("--bits", ra.bits, "Requantize to 8, 11, 13 or 16 bits");
  raster->add_flag("--stretch", ra.stretch, "Use a 2-98 percentile stretch when requantizing");
  raster->add_option("--factor", ra.factor, "Integer upsampling factor")->capture_default_str();
  raster->add_option("--method", ra.method, "bilinear or nearest")->capture_default_str();
  raster->add_option("--gsd", ra.gsd, "GSD when the file has no pixel scale")->capture_default_str();
  raster->add_option("--out", ra.out, "Write the converted TIFF and its band sidecar");

  fs::path patch_gt, patch_rasters, patch_dir;
  std::uint64_t patch_seed = 0;
  auto* patches = app.add_subcommand("patches", "Building and background patches for classifier training");
  patches->add_option("gt", patch_gt, "Annotation JSONL")->required();
  patches->add_option("--raster-dir", patch_rasters, "Rasters named <scene>.tif")->required();
  patches->add_option("--seed", patch_seed, "Negative sampling seed")->required();
  patches->add_option("--out-dir", patch_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version are "errors" with exit code 0.
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  auto log = make_logger(err);
  try {
    if (*prepare) return cmd_prepare(prep, out, *log);
    if (*evaluate) return cmd_evaluate(ev, out, err, *log);
    if (*stats) return cmd_stats(folds, test, stats_out, out);
    if (*expand_cmd) return cmd_expand(ex, out);
    if (*synth) return cmd_synth(synth_spec, synth_seed, synth_dir, synth_jobs, out);
    if (*split) return cmd_split(split_gt, kfold, holdout, split_seed, split_out, out);
    if (*plot) return cmd_plot(plot_in, plot_format, plot_out, out);
    if (*raster) return cmd_raster(ra, out);
    if (*patches) return cmd_patches(patch_gt, patch_rasters, patch_seed, patch_dir, out, *log);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  err << "internal error: no subcommand ran\n";
  return kInternalError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"spectra"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace spectra::cli
