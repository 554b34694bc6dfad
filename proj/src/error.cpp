#include "hypertopic/error.hpp"

namespace hypertopic {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptySupport: return "EmptySupport";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::SizeGuard: return "SizeGuard";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorKind::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace hypertopic
