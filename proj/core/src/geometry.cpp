#include "spectra/geometry.hpp"

#include <cmath>

namespace spectra {

bool BBox::valid() const noexcept {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min < x_max && y_min < y_max;
}

BBox clip(const BBox& box, const BBox& extent) noexcept {
  return BBox{std::max(box.x_min, extent.x_min), std::max(box.y_min, extent.y_min),
              std::min(box.x_max, extent.x_max), std::min(box.y_max, extent.y_max)};
}

BBox expand_and_clip(const BBox& box, double margin, const BBox& extent) noexcept {
  return clip(BBox{box.x_min - margin, box.y_min - margin, box.x_max + margin, box.y_max + margin},
              extent);
}

}  // namespace spectra
