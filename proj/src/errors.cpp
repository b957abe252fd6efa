#include "blowup/errors.hpp"

namespace blowup {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::SigmaOutOfRange: return "SigmaOutOfRange";
    case ErrorCode::CriticalRegime: return "CriticalRegime";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::NotACriticalPoint: return "NotACriticalPoint";
    case ErrorCode::NoProfileBehavior: return "NoProfileBehavior";
    case ErrorCode::AsymmetricTensor: return "AsymmetricTensor";
    case ErrorCode::DegenerateSigns: return "DegenerateSigns";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::BlowupInPhaseVariables: return "BlowupInPhaseVariables";
    case ErrorCode::NonInvertibleOrbit: return "NonInvertibleOrbit";
    case ErrorCode::NoInterface: return "NoInterface";
    case ErrorCode::WrongInterfaceType: return "WrongInterfaceType";
    case ErrorCode::NegativeF: return "NegativeF";
    case ErrorCode::IntegrationFailure: return "IntegrationFailure";
    case ErrorCode::BracketInvalid: return "BracketInvalid";
    case ErrorCode::Undecided: return "Undecided";
  }
  return "Unknown";
}

}  // namespace blowup
