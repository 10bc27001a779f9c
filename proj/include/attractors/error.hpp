#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace attractors {

enum class ErrorCode {
  InvalidArgument,
  UnknownSystem,
  NumericalBlowup,
  DegenerateSeparation,
  RankCollapse,
  TooShort,
  InsufficientRank,
  MalformedWeights,
  VersionMismatch,
  UnsupportedUpdateRate,
  MalformedInput,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Numerical failures map to CLI exit code 3, everything else to 2.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a step produces a non-finite entry. `index` is the first
/// offending coordinate; `timestep` is filled in by callers that know it.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(std::size_t index, std::int64_t timestep);

  std::size_t index() const noexcept { return index_; }
  std::int64_t timestep() const noexcept { return timestep_; }

 private:
  std::size_t index_;
  std::int64_t timestep_;
};

}  // namespace attractors
