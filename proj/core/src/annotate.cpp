#include "spectra/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spectra/error.hpp"
#include "spectra/rng.hpp"

namespace spectra {

SizeCategory size_category(double area_m2) {
  if (!(area_m2 >= 0.0)) throw Error(ErrorCode::InvalidArea, "area must be a non-negative number");
  if (area_m2 < kSizeEdges[0]) return SizeCategory::BelowMinimum;
  if (area_m2 < kSizeEdges[1]) return SizeCategory::VerySmall;
  if (area_m2 < kSizeEdges[2]) return SizeCategory::Small;
  if (area_m2 < kSizeEdges[3]) return SizeCategory::Medium;
  if (area_m2 < kSizeEdges[4]) return SizeCategory::Large;
  return SizeCategory::VeryLarge;
}

DensityCategory density_category(std::size_t building_count) noexcept {
  if (building_count < kDensityEdges[0]) return DensityCategory::Low;
  if (building_count < kDensityEdges[1]) return DensityCategory::Moderate;
  return DensityCategory::High;
}

std::string_view to_string(SizeCategory c) noexcept {
  switch (c) {
    case SizeCategory::BelowMinimum: return "below_minimum";
    case SizeCategory::VerySmall: return "very_small";
    case SizeCategory::Small: return "small";
    case SizeCategory::Medium: return "medium";
    case SizeCategory::Large: return "large";
    case SizeCategory::VeryLarge: return "very_large";
  }
  return "unknown";
}

std::string_view to_string(DensityCategory c) noexcept {
  switch (c) {
    case DensityCategory::Low: return "low";
    case DensityCategory::Moderate: return "moderate";
    case DensityCategory::High: return "high";
  }
  return "unknown";
}

std::optional<SizeCategory> parse_size_category(std::string_view s) noexcept {
  for (auto c : {SizeCategory::BelowMinimum, SizeCategory::VerySmall, SizeCategory::Small,
                 SizeCategory::Medium, SizeCategory::Large, SizeCategory::VeryLarge}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::optional<DensityCategory> parse_density_category(std::string_view s) noexcept {
  for (auto c : kDensities) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

Annotation make_annotation(std::string scene_id, const BBox& box) {
  if (!box.valid()) throw Error(ErrorCode::InvalidArgument, "annotation box is not a valid box");
  const double area = box.area();
  return Annotation{std::move(scene_id), box, area, size_category(area)};
}

BBox footprint_to_bbox(std::span<const Point> polygon) {
  if (polygon.size() < 3)
    throw Error(ErrorCode::InvalidArgument, "footprint needs at least three vertices");
  BBox box{polygon[0].x, polygon[0].y, polygon[0].x, polygon[0].y};
  for (const auto& p : polygon) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw Error(ErrorCode::InvalidArgument, "footprint has non-finite coordinates");
    box.x_min = std::min(box.x_min, p.x);
    box.y_min = std::min(box.y_min, p.y);
    box.x_max = std::max(box.x_max, p.x);
    box.y_max = std::max(box.y_max, p.y);
  }
  if (!(box.x_min < box.x_max) || !(box.y_min < box.y_max))
    throw Error(ErrorCode::DegenerateFootprint, "footprint has zero width or height");
  return box;
}

std::vector<Annotation> filter_and_pad(std::span<const Annotation> gt, const PadOptions& options,
                                       const BBox& extent) {
  if (!(options.min_area_m2 >= 0.0) || !(options.pad_m >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "min_area and pad must be non-negative");
  if (!extent.valid()) throw Error(ErrorCode::InvalidArgument, "scene extent is not a valid box");
  const double per_side = options.mode == PadMode::PerSide ? options.pad_m : options.pad_m / 2.0;

  std::vector<Annotation> out;
  out.reserve(gt.size());
  for (const auto& a : gt) {
    const double area = a.bbox.area();
    if (area < options.min_area_m2) continue;
    const BBox padded = expand_and_clip(a.bbox, per_side, extent);
    if (!padded.valid()) continue;
    out.push_back(Annotation{a.scene_id, padded, area, size_category(area)});
  }
  return out;
}

std::vector<std::string> SplitPlan::train_for(std::size_t test_fold) const {
  if (test_fold >= folds.size()) throw Error(ErrorCode::InvalidArgument, "fold index out of range");
  std::vector<std::string> train;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f != test_fold) train.insert(train.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(train.begin(), train.end());
  return train;
}

namespace {

std::vector<std::string> shuffled_ids(std::span<const std::string> scene_ids, std::uint64_t seed) {
  if (scene_ids.empty()) throw Error(ErrorCode::EmptyInput, "no scenes to split");
  std::vector<std::string> ids(scene_ids.begin(), scene_ids.end());
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw Error(ErrorCode::InvalidArgument, "duplicate scene id in split input");
  Rng rng(seed);
  rng.shuffle(ids.begin(), ids.end());
  return ids;
}

SplitPlan deal(std::vector<std::string> ids, std::span<const std::size_t> sizes, std::uint64_t seed) {
  SplitPlan plan;
  plan.seed = seed;
  auto it = ids.begin();
  for (auto n : sizes) {
    std::vector<std::string> fold(std::make_move_iterator(it),
                                  std::make_move_iterator(it + static_cast<std::ptrdiff_t>(n)));
    std::sort(fold.begin(), fold.end());
    plan.folds.push_back(std::move(fold));
    it += static_cast<std::ptrdiff_t>(n);
  }
  return plan;
}

}  // namespace

SplitPlan make_splits(std::span<const std::string> scene_ids, HoldoutSplit mode, std::uint64_t seed) {
  if (!(mode.train_ratio > 0.0 && mode.train_ratio < 1.0))
    throw Error(ErrorCode::InvalidArgument, "holdout ratio must lie in (0, 1)");
  auto ids = shuffled_ids(scene_ids, seed);
  if (ids.size() < 2) throw Error(ErrorCode::InvalidArgument, "holdout needs at least two scenes");
  const auto n = ids.size();
  const auto train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * mode.train_ratio)), 1, n - 1);
  const std::array<std::size_t, 2> sizes{train, n - train};
  return deal(std::move(ids), sizes, seed);
}

SplitPlan make_splits(std::span<const std::string> scene_ids, KFoldSplit mode, std::uint64_t seed) {
  if (mode.k < 2) throw Error(ErrorCode::InvalidArgument, "k-fold needs k >= 2");
  auto ids = shuffled_ids(scene_ids, seed);
  if (ids.size() < mode.k)
    throw Error(ErrorCode::InvalidArgument, "fewer scenes than folds");
  std::vector<std::size_t> sizes(mode.k, ids.size() / mode.k);
  for (std::size_t i = 0; i < ids.size() % mode.k; ++i) ++sizes[i];
  return deal(std::move(ids), sizes, seed);
}

namespace {

MultibandImage crop_meters(const MultibandImage& img, const BBox& extent, const BBox& box) {
  constexpr double eps = 1e-9;
  const auto to_px = [](double v, double gsd, std::size_t limit, bool upper) {
    const double p = v / gsd;
    const double r = upper ? std::ceil(p - eps) : std::floor(p + eps);
    return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(limit)));
  };
  const auto c0 = to_px(box.x_min - extent.x_min, img.gsd_x(), img.width(), false);
  const auto c1 = to_px(box.x_max - extent.x_min, img.gsd_x(), img.width(), true);
  const auto r0 = to_px(box.y_min - extent.y_min, img.gsd_y(), img.height(), false);
  const auto r1 = to_px(box.y_max - extent.y_min, img.gsd_y(), img.height(), true);
  if (c0 >= c1 || r0 >= r1)
    throw Error(ErrorCode::InvalidArgument, "patch box falls outside the raster");
  return crop(img, c0, r0, c1, r1);
}

}  // namespace

std::vector<Patch> extract_patches(const SceneRecord& scene, const MultibandImage& img,
                                   std::uint64_t seed, const PatchOptions& options) {
  std::vector<Patch> patches;
  if (scene.gt.empty()) return patches;
  const BBox& extent = scene.extent;

  for (const auto& a : scene.gt) {
    patches.push_back({a.bbox, PatchLabel::Building, crop_meters(img, extent, a.bbox)});
  }

  Rng rng(seed);
  const std::size_t needed = scene.gt.size();
  std::size_t produced = 0;
  for (std::size_t n = 0; n < needed; ++n) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < options.max_attempts_per_negative; ++attempt) {
      const auto& donor = scene.gt[rng.below(scene.gt.size())].bbox;
      const double w = donor.width(), h = donor.height();
      const double slack_x = extent.width() - w, slack_y = extent.height() - h;
      if (slack_x < 0.0 || slack_y < 0.0) continue;
      const double x0 = extent.x_min + rng.uniform() * slack_x;
      const double y0 = extent.y_min + rng.uniform() * slack_y;
      const BBox candidate{x0, y0, x0 + w, y0 + h};
      const bool clear = std::none_of(scene.gt.begin(), scene.gt.end(), [&](const Annotation& g) {
        return intersection_area(candidate, g.bbox) > 0.0;
      });
      if (!clear) continue;
      patches.push_back({candidate, PatchLabel::NotBuilding, crop_meters(img, extent, candidate)});
      accepted = true;
      break;
    }
    if (!accepted) throw NegativeSamplingExhausted(produced, needed);
    ++produced;
  }
  return patches;
}

}  // namespace spectra
