#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spectra/geometry.hpp"
#include "spectra/raster.hpp"

namespace spectra {

/// Building-size bins in square meters, half-open and lower-inclusive:
/// [0,25) [25,75) [75,118) [118,168) [168,250) [250,inf).
enum class SizeCategory { BelowMinimum, VerySmall, Small, Medium, Large, VeryLarge };

/// Buildings per scene: [0,40) [40,90) [90,inf).
enum class DensityCategory { Low, Moderate, High };

inline constexpr std::array<double, 5> kSizeEdges{25.0, 75.0, 118.0, 168.0, 250.0};
inline constexpr std::array<std::size_t, 2> kDensityEdges{40, 90};

/// The five strata reported in per-size tables (BelowMinimum excluded).
inline constexpr std::array<SizeCategory, 5> kReportedSizes{
    SizeCategory::VerySmall, SizeCategory::Small, SizeCategory::Medium, SizeCategory::Large,
    SizeCategory::VeryLarge};
inline constexpr std::array<DensityCategory, 3> kDensities{
    DensityCategory::Low, DensityCategory::Moderate, DensityCategory::High};

SizeCategory size_category(double area_m2);
DensityCategory density_category(std::size_t building_count) noexcept;

std::string_view to_string(SizeCategory c) noexcept;
std::string_view to_string(DensityCategory c) noexcept;
std::optional<SizeCategory> parse_size_category(std::string_view s) noexcept;
std::optional<DensityCategory> parse_density_category(std::string_view s) noexcept;

struct Annotation {
  std::string scene_id;
  BBox bbox;
  /// Area of the unpadded footprint box. Padding changes `bbox` but not
  /// this field, so the size category always describes the building.
  double area_m2 = 0.0;
  SizeCategory size = SizeCategory::BelowMinimum;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Annotation for an unpadded box; area and category computed from it.
Annotation make_annotation(std::string scene_id, const BBox& box);

struct SceneRecord {
  std::string scene_id;
  BBox extent;
  std::vector<Annotation> gt;

  DensityCategory density() const noexcept { return density_category(gt.size()); }

  friend bool operator==(const SceneRecord&, const SceneRecord&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Tight box around a polygon's vertices. Throws DegenerateFootprint when
/// the vertices span zero width or height.
BBox footprint_to_bbox(std::span<const Point> polygon);

enum class PadMode {
  PerSide,  // `pad` meters added to each of the four sides
  Total,    // `pad / 2` meters per side
};

struct PadOptions {
  double min_area_m2 = 25.0;
  double pad_m = 6.0;
  PadMode mode = PadMode::PerSide;
};

/// Drops boxes whose unpadded area is below the minimum, then pads the
/// survivors and clips them to `extent`. Boxes lying entirely outside the
/// extent are dropped as well.
std::vector<Annotation> filter_and_pad(std::span<const Annotation> gt, const PadOptions& options,
                                       const BBox& extent);

struct HoldoutSplit {
  double train_ratio = 0.8;
};
struct KFoldSplit {
  std::size_t k = 5;
};

/// Disjoint folds covering every scene. Holdout plans have two folds
/// (train, test); k-fold plans have k folds whose sizes differ by at most one.
struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> folds;

  std::size_t k() const noexcept { return folds.size(); }

  /// Training scenes when fold `test_fold` is held out.
  std::vector<std::string> train_for(std::size_t test_fold) const;

  friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

/// Scene ids are sorted before shuffling, so the plan depends only on the
/// set of ids and the seed.
SplitPlan make_splits(std::span<const std::string> scene_ids, HoldoutSplit mode, std::uint64_t seed);
SplitPlan make_splits(std::span<const std::string> scene_ids, KFoldSplit mode, std::uint64_t seed);

enum class PatchLabel { Building, NotBuilding };

struct Patch {
  BBox box;  // meters, scene-local
  PatchLabel label = PatchLabel::Building;
  MultibandImage raster;
};

struct PatchOptions {
  std::size_t max_attempts_per_negative = 1000;
};

/// One positive crop per annotation plus an equal number of negatives.
/// Negative boxes reuse sizes drawn from the scene's positives and are
/// placed uniformly inside the extent; a candidate is accepted only when
/// it has zero overlap area with every ground-truth box. Pixel windows are
/// the meter boxes divided by the image GSD, rounded outward.
std::vector<Patch> extract_patches(const SceneRecord& scene, const MultibandImage& img,
                                   std::uint64_t seed, const PatchOptions& options = {});

}  // namespace spectra
