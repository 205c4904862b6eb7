#pragma once

#include <algorithm>

namespace spectra {

/// Axis-aligned box in scene-local meters, origin top-left, y down.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return width() * height(); }

  /// Finite coordinates with strictly positive extent on both axes.
  bool valid() const noexcept;

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Overlap area; zero for disjoint or edge-touching boxes.
inline double intersection_area(const BBox& a, const BBox& b) noexcept {
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

/// Intersection over union in [0, 1].
inline double iou(const BBox& a, const BBox& b) noexcept {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? std::min(1.0, inter / uni) : 0.0;
}

/// Grow every side by `margin` and clip the result to `extent`.
BBox expand_and_clip(const BBox& box, double margin, const BBox& extent) noexcept;

/// Clip to `extent`; the result may be invalid when the box lies outside.
BBox clip(const BBox& box, const BBox& extent) noexcept;

}  // namespace spectra
