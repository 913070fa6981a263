#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qwalk {

enum class ErrorCode {
  NotHermitian,
  NoConvergence,
  BadNorm,
  BadRange,
  DirectBackendTooLarge,
  BasisMismatch,
  DiagonalOnlyStored,
  TooLarge,
  NotDensity,
  HorizonTooShort,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadNorm: return "BadNorm";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::DirectBackendTooLarge: return "DirectBackendTooLarge";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::DiagonalOnlyStored: return "DiagonalOnlyStored";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotDensity: return "NotDensity";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable error kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qwalk
