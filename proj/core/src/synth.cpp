#include "spectra/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "spectra/error.hpp"
#include "spectra/parallel.hpp"
#include "spectra/rng.hpp"

namespace spectra {

void SynthSpec::validate() const {
  if (n_scenes == 0) throw Error(ErrorCode::InvalidArgument, "n_scenes must be positive");
  double total = 0.0;
  for (double w : size_mix) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "size_mix weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "size_mix weights must sum to > 0");
  const auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0))
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must lie in [0, 1]");
  };
  rate(detector.dropout_rate, "dropout rate");
  rate(detector.spurious_rate, "spurious rate");
  rate(detector.confidence_min, "confidence_min");
  rate(detector.confidence_max, "confidence_max");
  if (detector.confidence_min > detector.confidence_max)
    throw Error(ErrorCode::InvalidArgument, "confidence_min exceeds confidence_max");
  if (!(detector.jitter_sigma_m >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "jitter sigma must be non-negative");
  if (!(extent_m > 0.0)) throw Error(ErrorCode::InvalidArgument, "extent must be positive");
  if (max_attempts == 0) throw Error(ErrorCode::InvalidArgument, "max_attempts must be positive");
}

std::array<std::size_t, 2> density_count_range(DensityCategory c) noexcept {
  switch (c) {
    case DensityCategory::Low: return {1, 39};
    case DensityCategory::Moderate: return {40, 89};
    case DensityCategory::High: return {90, 130};
  }
  return {1, 39};
}

namespace {

// Upper edge used when drawing VeryLarge areas.
constexpr double kVeryLargeCap = 400.0;
constexpr double kMinDetectionSide = 0.5;

class SceneGenerator {
 public:
  SceneGenerator(const SynthSpec& spec, std::size_t index)
      : spec_(spec), rng_(spec.seed ^ static_cast<std::uint64_t>(index)) {
    extent_ = BBox{0.0, 0.0, spec.extent_m, spec.extent_m};
    const double total = std::accumulate(spec.size_mix.begin(), spec.size_mix.end(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < cumulative_.size(); ++i) {
      acc += spec.size_mix[i] / total;
      cumulative_[i] = acc;
    }
  }

  SceneEval run(std::string scene_id) {
    SceneEval out;
    out.scene.scene_id = std::move(scene_id);
    out.scene.extent = extent_;

    std::size_t count = 0;
    if (spec_.buildings_per_scene) {
      count = *spec_.buildings_per_scene;
    } else {
      const auto [lo, hi] = density_count_range(spec_.density.value_or(DensityCategory::Moderate));
      count = lo + rng_.below(hi - lo + 1);
    }

    for (std::size_t n = 0; n < count; ++n) {
      const BBox box = place([&](const BBox& b) {
        return std::none_of(out.scene.gt.begin(), out.scene.gt.end(),
                            [&](const Annotation& g) { return intersection_area(b, g.bbox) > 0.0; });
      });
      out.scene.gt.push_back(make_annotation(out.scene.scene_id, box));
    }

    const auto& det = spec_.detector;
    for (const auto& g : out.scene.gt) {
      if (rng_.bernoulli(det.dropout_rate)) continue;
      out.detections.push_back({out.scene.scene_id, jitter(g.bbox), confidence()});
    }

    std::size_t spurious = 0;
    for (std::size_t n = 0; n < out.scene.gt.size(); ++n) {
      if (rng_.bernoulli(det.spurious_rate)) ++spurious;
    }
    for (std::size_t n = 0; n < spurious; ++n) {
      const BBox box = place([&](const BBox& b) {
        return std::none_of(out.scene.gt.begin(), out.scene.gt.end(),
                            [&](const Annotation& g) { return intersection_area(b, g.bbox) > 0.0; });
      });
      out.detections.push_back({out.scene.scene_id, box, confidence()});
    }
    return out;
  }

 private:
  std::size_t draw_bin() {
    const double u = rng_.uniform();
    for (std::size_t i = 0; i < cumulative_.size(); ++i) {
      if (u < cumulative_[i] && spec_.size_mix[i] > 0.0) return i;
    }
    for (std::size_t i = cumulative_.size(); i-- > 0;) {
      if (spec_.size_mix[i] > 0.0) return i;
    }
    return 0;
  }

  template <typename Accept>
  BBox place(Accept&& accept) {
    for (std::size_t attempt = 0; attempt < spec_.max_attempts; ++attempt) {
      const std::size_t bin = draw_bin();
      const double lo = kSizeEdges[bin];
      const double hi = bin + 1 < kSizeEdges.size() ? kSizeEdges[bin + 1] : kVeryLargeCap;
      const double area = rng_.uniform(lo, hi);
      const double aspect = std::exp(rng_.uniform(std::log(0.5), std::log(2.0)));
      const double w = std::sqrt(area * aspect);
      const double h = area / w;
      if (w > extent_.width() || h > extent_.height()) continue;
      const double x0 = rng_.uniform(0.0, extent_.width() - w);
      const double y0 = rng_.uniform(0.0, extent_.height() - h);
      const BBox box{x0, y0, x0 + w, y0 + h};
      if (size_category(box.area()) != kReportedSizes[bin]) continue;
      if (accept(box)) return box;
    }
    throw Error(ErrorCode::PlacementExhausted,
                "could not place a box after " + std::to_string(spec_.max_attempts) + " attempts");
  }

  BBox jitter(const BBox& b) {
    const double s = spec_.detector.jitter_sigma_m;
    if (s == 0.0) return b;
    BBox j{b.x_min + rng_.normal(0.0, s), b.y_min + rng_.normal(0.0, s),
           b.x_max + rng_.normal(0.0, s), b.y_max + rng_.normal(0.0, s)};
    const auto fix_axis = [&](double& lo, double& hi, double ext_lo, double ext_hi) {
      if (hi - lo < kMinDetectionSide) {
        const double mid = 0.5 * (lo + hi);
        lo = mid - kMinDetectionSide / 2.0;
        hi = mid + kMinDetectionSide / 2.0;
      }
      const double shift = std::max(0.0, ext_lo - lo) - std::max(0.0, hi - ext_hi);
      lo = std::max(ext_lo, lo + shift);
      hi = std::min(ext_hi, hi + shift);
    };
    fix_axis(j.x_min, j.x_max, extent_.x_min, extent_.x_max);
    fix_axis(j.y_min, j.y_max, extent_.y_min, extent_.y_max);
    return j;
  }

  double confidence() {
    const auto& d = spec_.detector;
    return d.confidence_min + (d.confidence_max - d.confidence_min) * rng_.uniform();
  }

  const SynthSpec& spec_;
  Rng rng_;
  BBox extent_;
  std::array<double, 5> cumulative_{};
};

}  // namespace

std::vector<SceneEval> generate(const SynthSpec& spec, std::size_t jobs) {
  spec.validate();
  std::vector<SceneEval> scenes(spec.n_scenes);
  parallel_for(spec.n_scenes, jobs, [&](std::size_t i) {
    char id[32];
    std::snprintf(id, sizeof id, "synth_%06zu", i);
    scenes[i] = SceneGenerator(spec, i).run(id);
  });
  return scenes;
}

}  // namespace spectra
