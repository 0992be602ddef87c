#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqt {

enum class ErrorKind {
  InvalidArgument,
  InvalidSpec,
  NonInvertibleSymbol,
  NonzeroWindingNumber,
  NoConvergence,
  SingularWindow,
  SingularDenominator,
  SingularPivot,
  NotStochastic,
  DegenerateStationary,
  MaxSquaringsExceeded,
  SpectralRadiusOne,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::NonInvertibleSymbol: return "NonInvertibleSymbol";
    case ErrorKind::NonzeroWindingNumber: return "NonzeroWindingNumber";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::SingularWindow: return "SingularWindow";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::SingularPivot: return "SingularPivot";
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::DegenerateStationary: return "DegenerateStationary";
    case ErrorKind::MaxSquaringsExceeded: return "MaxSquaringsExceeded";
    case ErrorKind::SpectralRadiusOne: return "SpectralRadiusOne";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Usage-type errors (bad input) versus numerical failures.
  bool is_usage_error() const noexcept {
    return kind_ == ErrorKind::InvalidArgument ||
           kind_ == ErrorKind::InvalidSpec;
  }

 private:
  ErrorKind kind_;
};

}  // namespace eqt
