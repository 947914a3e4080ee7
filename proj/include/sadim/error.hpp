#pragma once

#include <stdexcept>
#include <string>

namespace sadim {

enum class ErrorKind {
  InvalidArgument,
  SingularMatrix,
  ScaleTooSmall,
  BudgetExceeded,
  NoBracket,
  NoRootInRange,
  WrongStructure,
  NotDominatedWithin,
  ConeCollapse,
  NoConvergence,
  DepthExceeded,
  NotForwardInvariant,
  WrongPreset,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::ScaleTooSmall: return "ScaleTooSmall";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NoRootInRange: return "NoRootInRange";
    case ErrorKind::WrongStructure: return "WrongStructure";
    case ErrorKind::NotDominatedWithin: return "NotDominatedWithin";
    case ErrorKind::ConeCollapse: return "ConeCollapse";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::NotForwardInvariant: return "NotForwardInvariant";
    case ErrorKind::WrongPreset: return "WrongPreset";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sadim
