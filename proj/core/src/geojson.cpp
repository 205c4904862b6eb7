#include "spectra/geojson.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spectra/error.hpp"

namespace spectra {
namespace {

using nlohmann::json;

std::vector<Point> read_ring(const json& ring) {
  std::vector<Point> pts;
  for (const auto& c : ring) {
    if (!c.is_array() || c.size() < 2) throw Error(ErrorCode::InvalidArgument, "bad coordinate pair");
    pts.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return pts;
}

}  // namespace

FootprintSet parse_footprints(std::string_view geojson_text) {
  FootprintSet set;
  try {
    const auto doc = json::parse(geojson_text);
    if (doc.value("type", "") != "FeatureCollection")
      throw Error(ErrorCode::InvalidArgument, "expected a GeoJSON FeatureCollection");
    if (const auto it = doc.find("crs_mode"); it != doc.end()) {
      const auto mode = it->get<std::string>();
      if (mode == "local_meters") {
        set.crs_mode = CrsMode::LocalMeters;
      } else if (mode == "pixels") {
        set.crs_mode = CrsMode::Pixels;
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown crs_mode '" + mode + "'");
      }
    }
    if (const auto it = doc.find("extent"); it != doc.end()) {
      const auto e = it->get<std::vector<double>>();
      if (e.size() != 4) throw Error(ErrorCode::InvalidArgument, "extent must have four numbers");
      set.extent = BBox{e[0], e[1], e[2], e[3]};
    }
    for (const auto& feature : doc.at("features")) {
      const auto& geom = feature.at("geometry");
      if (geom.is_null()) continue;
      const auto type = geom.at("type").get<std::string>();
      if (type == "Polygon") {
        const auto& rings = geom.at("coordinates");
        if (!rings.empty()) set.rings.push_back(read_ring(rings.at(0)));
      } else if (type == "MultiPolygon") {
        for (const auto& poly : geom.at("coordinates"))
          if (!poly.empty()) set.rings.push_back(read_ring(poly.at(0)));
      } else {
        throw Error(ErrorCode::InvalidArgument, "unsupported geometry type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed GeoJSON: ") + e.what());
  }
  return set;
}

FootprintSet read_footprints(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_footprints(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.what());
  }
}

FootprintSet to_meters(FootprintSet set, double gsd_x, double gsd_y) {
  if (set.crs_mode == CrsMode::LocalMeters) return set;
  if (!(gsd_x > 0.0) || !(gsd_y > 0.0))
    throw Error(ErrorCode::InvalidArgument, "pixel footprints need a positive GSD");
  for (auto& ring : set.rings) {
    for (auto& p : ring) {
      p.x *= gsd_x;
      p.y *= gsd_y;
    }
  }
  if (set.extent) {
    set.extent = BBox{set.extent->x_min * gsd_x, set.extent->y_min * gsd_y,
                      set.extent->x_max * gsd_x, set.extent->y_max * gsd_y};
  }
  set.crs_mode = CrsMode::LocalMeters;
  return set;
}

PreparedScene prepare_scene(std::string scene_id, const FootprintSet& footprints, const BBox& extent,
                            const PadOptions& options) {
  if (footprints.crs_mode != CrsMode::LocalMeters)
    throw Error(ErrorCode::InvalidArgument, "footprints must be converted to meters first");
  PreparedScene out;
  out.total = footprints.rings.size();
  std::vector<Annotation> raw;
  raw.reserve(footprints.rings.size());
  for (const auto& ring : footprints.rings) {
    try {
      raw.push_back(make_annotation(scene_id, footprint_to_bbox(ring)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateFootprint) throw;
      ++out.degenerate;
    }
  }
  out.record.scene_id = std::move(scene_id);
  out.record.extent = extent;
  out.record.gt = filter_and_pad(raw, options, extent);
  out.discarded = out.total - out.record.gt.size();
  return out;
}

}  // namespace spectra
