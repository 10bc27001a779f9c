#include "attractors/error.hpp"

namespace attractors {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownSystem: return "UnknownSystem";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::DegenerateSeparation: return "DegenerateSeparation";
    case ErrorCode::RankCollapse: return "RankCollapse";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::InsufficientRank: return "InsufficientRank";
    case ErrorCode::MalformedWeights: return "MalformedWeights";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::UnsupportedUpdateRate: return "UnsupportedUpdateRate";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::NumericalBlowup:
    case ErrorCode::DegenerateSeparation:
    case ErrorCode::RankCollapse:
    case ErrorCode::TooShort:
    case ErrorCode::InsufficientRank:
      return true;
    default:
      return false;
  }
}

NumericalBlowup::NumericalBlowup(std::size_t index, std::int64_t timestep)
    : Error(ErrorCode::NumericalBlowup,
            "non-finite state at index " + std::to_string(index) +
                (timestep >= 0 ? " (timestep " + std::to_string(timestep) + ")"
                               : std::string{})),
      index_(index),
      timestep_(timestep) {}

}  // namespace attractors
