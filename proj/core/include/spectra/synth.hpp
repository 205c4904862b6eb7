#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "spectra/annotate.hpp"
#include "spectra/matcheval.hpp"

namespace spectra {

/// Mock detector applied to every ground-truth box. All-zero parameters
/// and a confidence range of [1, 1] give a perfect detector.
struct DetectorModel {
  double jitter_sigma_m = 0.0;  // Gaussian displacement of each box edge
  double dropout_rate = 0.0;    // probability a ground-truth box is missed
  /// Spurious boxes per ground-truth box: each scene receives
  /// Binomial(|gt|, spurious_rate) extra detections that do not overlap
  /// any ground truth.
  double spurious_rate = 0.0;
  double confidence_min = 1.0;  // confidences drawn uniformly in [min, max]
  double confidence_max = 1.0;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t n_scenes = 1;
  /// Either a density category (count drawn within its range) or an
  /// exact building count per scene.
  std::optional<DensityCategory> density;
  std::optional<std::size_t> buildings_per_scene;
  /// Relative weights over VerySmall .. VeryLarge.
  std::array<double, 5> size_mix{1.0, 1.0, 1.0, 1.0, 1.0};
  DetectorModel detector;
  double extent_m = 210.0;
  std::size_t max_attempts = 10000;  // per placed box

  void validate() const;
};

/// Building counts drawn for a density target: Low [1, 39],
/// Moderate [40, 89], High [90, 130].
std::array<std::size_t, 2> density_count_range(DensityCategory c) noexcept;

/// Deterministic scenes with pairwise-disjoint ground truth and mock
/// detections. Scene i uses seed (spec.seed XOR i) and id "synth_000042" (zero-padded index).
/// Throws PlacementExhausted when a box cannot be placed without overlap.
std::vector<SceneEval> generate(const SynthSpec& spec, std::size_t jobs = 1);

}  // namespace spectra
