#include "fwdflat/error.hpp"

namespace fwdflat {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DivisionByZeroScalar: return "DivisionByZeroScalar";
    case Errc::SubstitutionSingular: return "SubstitutionSingular";
    case Errc::NotLinearInVariable: return "NotLinearInVariable";
    case Errc::CoefficientVanishes: return "CoefficientVanishes";
    case Errc::EvalSingular: return "EvalSingular";
    case Errc::ChartMismatch: return "ChartMismatch";
    case Errc::InversionFailed: return "InversionFailed";
    case Errc::HintInvalid: return "HintInvalid";
    case Errc::NotProjectable: return "NotProjectable";
    case Errc::NotShiftable: return "NotShiftable";
    case Errc::UnsupportedShift: return "UnsupportedShift";
    case Errc::DualityViolation: return "DualityViolation";
    case Errc::InternalInconsistency: return "InternalInconsistency";
    case Errc::IntegralsNotFound: return "IntegralsNotFound";
    case Errc::NormalizationFailed: return "NormalizationFailed";
    case Errc::NotDecomposable: return "NotDecomposable";
    case Errc::ParseError: return "ParseError";
    case Errc::NonRationalExpression: return "NonRationalExpression";
    case Errc::SubmersivityFailed: return "SubmersivityFailed";
    case Errc::EquilibriumMismatch: return "EquilibriumMismatch";
    case Errc::InvalidSystem: return "InvalidSystem";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

}  // namespace fwdflat
