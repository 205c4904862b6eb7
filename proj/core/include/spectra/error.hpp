#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spectra {

enum class ErrorCode {
  InvalidArgument,
  UnsupportedFormat,
  CorruptRaster,
  InvalidTarget,
  BandNotFound,
  DegenerateFootprint,
  InvalidArea,
  EmptyInput,
  NegativeSamplingExhausted,
  SceneMismatch,
  DuplicateScene,
  InsufficientFolds,
  DegenerateVariance,
  MissingWavelengths,
  CorruptTensorFile,
  PlacementExhausted,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by patch extraction when rejection sampling cannot find enough
/// building-free windows. `produced()` is the number of negatives obtained.
class NegativeSamplingExhausted : public Error {
 public:
  NegativeSamplingExhausted(std::size_t produced, std::size_t needed);

  std::size_t produced() const noexcept { return produced_; }
  std::size_t needed() const noexcept { return needed_; }

 private:
  std::size_t produced_;
  std::size_t needed_;
};

}  // namespace spectra
