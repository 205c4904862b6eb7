#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectra/annotate.hpp"

namespace spectra {

enum class CrsMode { LocalMeters, Pixels };

/// Building footprints from a GeoJSON FeatureCollection of Polygon
/// features. Only the outer ring of each polygon is kept.
///
/// Two optional foreign members are understood at the top level:
/// `"crs_mode"` ("local_meters", the default, or "pixels") and
/// `"extent"` ([x0, y0, x1, y1] in the same units as the coordinates).
struct FootprintSet {
  CrsMode crs_mode = CrsMode::LocalMeters;
  std::vector<std::vector<Point>> rings;
  std::optional<BBox> extent;
};

FootprintSet parse_footprints(std::string_view geojson_text);
FootprintSet read_footprints(const std::filesystem::path& path);

/// Converts pixel-unit footprints (and extent) to meters: m = px * gsd.
/// Meter-unit input is returned unchanged.
FootprintSet to_meters(FootprintSet set, double gsd_x, double gsd_y);

struct PreparedScene {
  SceneRecord record;
  std::size_t total = 0;       // footprints read
  std::size_t degenerate = 0;  // zero width/height footprints (also discarded)
  std::size_t discarded = 0;   // removed by the area filter, degenerate ones included
};

/// Footprints (already in meters) -> filtered, padded scene record.
PreparedScene prepare_scene(std::string scene_id, const FootprintSet& footprints, const BBox& extent,
                            const PadOptions& options);

}  // namespace spectra
