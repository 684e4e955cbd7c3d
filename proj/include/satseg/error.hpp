#pragma once

#include <stdexcept>
#include <string>

namespace satseg {

enum class ErrorCode {
  MalformedHeader,
  LengthMismatch,
  UnsupportedDtype,
  UnsupportedVersion,
  IoFailure,
  ShapeMismatch,
  DuplicateBandName,
  MissingBand,
  ResolutionMismatch,
  DivisionDegeneracy,
  NonSquareInput,
  ImageTooSmall,
  MarginTooLarge,
  CoverageGap,
  CoverageOverlapConflict,
  BandMismatch,
  NaNGradient,
  ConfigError,
};

// Exit-code categories used by the CLI: 2 config, 3 data, 4 numerical.
enum class ErrorKind { Config = 2, Data = 3, Numeric = 4 };

constexpr ErrorKind error_kind(ErrorCode c) {
  switch (c) {
    case ErrorCode::ConfigError:
      return ErrorKind::Config;
    case ErrorCode::NaNGradient:
    case ErrorCode::DivisionDegeneracy:
      return ErrorKind::Numeric;
    default:
      return ErrorKind::Data;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorKind kind() const { return error_kind(code_); }
  int exit_code() const { return static_cast<int>(kind()); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace satseg
