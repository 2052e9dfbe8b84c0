#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vbd {

enum class ErrorKind {
  InvalidArgument,
  // numerics
  NoSignChange,
  MaxIterExceeded,
  InvalidInterval,
  NonFiniteState,
  // within-host
  NonPositiveParameter,
  NonOscillatory,
  EntryOutOfRange,
  RootNotFound,
  BelowThreshold,
  ExhaustedBudget,
  // reproduction
  NonConstantBetaHv,
  // solvers
  NegativeState,
  BufferMisaligned,
  CflViolation,
  NonFiniteField,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Numerical failure raised by the library. Configuration problems are
/// reported separately by the CLI layer.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorKind::NonOscillatory: return "NonOscillatory";
    case ErrorKind::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorKind::RootNotFound: return "RootNotFound";
    case ErrorKind::BelowThreshold: return "BelowThreshold";
    case ErrorKind::ExhaustedBudget: return "ExhaustedBudget";
    case ErrorKind::NonConstantBetaHv: return "NonConstantBetaHv";
    case ErrorKind::NegativeState: return "NegativeState";
    case ErrorKind::BufferMisaligned: return "BufferMisaligned";
    case ErrorKind::CflViolation: return "CflViolation";
    case ErrorKind::NonFiniteField: return "NonFiniteField";
  }
  return "Unknown";
}

}  // namespace vbd
