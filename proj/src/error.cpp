#include "qgp/error.hpp"

namespace qgp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::GapClosure: return "GapClosure";
    case ErrorKind::TrackingAmbiguity: return "TrackingAmbiguity";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::UndefinedArg: return "UndefinedArg";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::DegenerateCoupling: return "DegenerateCoupling";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorKind::MatchingAmbiguity: return "MatchingAmbiguity";
    case ErrorKind::Inapplicable: return "Inapplicable";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::DegenerateA: return "DegenerateA";
    case ErrorKind::OutOfRegime: return "OutOfRegime";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace qgp
