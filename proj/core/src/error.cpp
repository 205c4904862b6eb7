#include "spectra/error.hpp"

namespace spectra {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptRaster: return "CorruptRaster";
    case ErrorCode::InvalidTarget: return "InvalidTarget";
    case ErrorCode::BandNotFound: return "BandNotFound";
    case ErrorCode::DegenerateFootprint: return "DegenerateFootprint";
    case ErrorCode::InvalidArea: return "InvalidArea";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NegativeSamplingExhausted: return "NegativeSamplingExhausted";
    case ErrorCode::SceneMismatch: return "SceneMismatch";
    case ErrorCode::DuplicateScene: return "DuplicateScene";
    case ErrorCode::InsufficientFolds: return "InsufficientFolds";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::MissingWavelengths: return "MissingWavelengths";
    case ErrorCode::CorruptTensorFile: return "CorruptTensorFile";
    case ErrorCode::PlacementExhausted: return "PlacementExhausted";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

NegativeSamplingExhausted::NegativeSamplingExhausted(std::size_t produced, std::size_t needed)
    : Error(ErrorCode::NegativeSamplingExhausted,
            "obtained " + std::to_string(produced) + " of " + std::to_string(needed) +
                " negative patches"),
      produced_(produced),
      needed_(needed) {}

}  // namespace spectra
