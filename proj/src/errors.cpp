#include "spine/errors.hpp"

namespace spine {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Domain: return "Domain";
    case ErrorCode::EmptyPopulation: return "EmptyPopulation";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::ModelShape: return "ModelShape";
    case ErrorCode::Capacity: return "Capacity";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NoNullVector: return "NoNullVector";
    case ErrorCode::PositivityLoss: return "PositivityLoss";
    case ErrorCode::MajorantExceeded: return "MajorantExceeded";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

void raise(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace spine
