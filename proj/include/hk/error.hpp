#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hk {

enum class Errc {
  ShapeMismatch,
  SingularMatrix,
  NonDiagonalizable,
  SpectrumOnCut,
  ResolventSingular,
  InvalidExponent,
  AlphaOutOfRange,
  ExponentNotNegative,
  RegularizerOrderTooLow,
  StructureUnknown,
  EmptySamples,
  QuadratureFailed,
  InvalidArgument,
  Parse,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::NonDiagonalizable: return "NonDiagonalizable";
    case Errc::SpectrumOnCut: return "SpectrumOnCut";
    case Errc::ResolventSingular: return "ResolventSingular";
    case Errc::InvalidExponent: return "InvalidExponent";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::ExponentNotNegative: return "ExponentNotNegative";
    case Errc::RegularizerOrderTooLow: return "RegularizerOrderTooLow";
    case Errc::StructureUnknown: return "StructureUnknown";
    case Errc::EmptySamples: return "EmptySamples";
    case Errc::QuadratureFailed: return "QuadratureFailed";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Parse: return "Parse";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised when A + sI is singular to working precision; `shift()` is the offending s.
class ResolventSingularError : public Error {
 public:
  explicit ResolventSingularError(double shift)
      : Error(Errc::ResolventSingular, "A + sI singular at s = " + std::to_string(shift)),
        shift_(shift) {}

  double shift() const noexcept { return shift_; }

 private:
  double shift_;
};

}  // namespace hk
