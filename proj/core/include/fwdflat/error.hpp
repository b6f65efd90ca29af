#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fwdflat {

/// Error categories raised by the library. Every throw site uses one of these.
enum class Errc {
  DivisionByZeroScalar,
  SubstitutionSingular,
  NotLinearInVariable,
  CoefficientVanishes,
  EvalSingular,
  ChartMismatch,
  InversionFailed,
  HintInvalid,
  NotProjectable,
  NotShiftable,
  UnsupportedShift,
  DualityViolation,
  InternalInconsistency,
  IntegralsNotFound,
  NormalizationFailed,
  NotDecomposable,
  ParseError,
  NonRationalExpression,
  SubmersivityFailed,
  EquilibriumMismatch,
  InvalidSystem,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }
  /// Text without the error-code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::string message_;
};

}  // namespace fwdflat
