#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

enum class ErrorCode {
  InvalidParameters,
  SigmaOutOfRange,
  CriticalRegime,
  RegimeMismatch,
  DegenerateInput,
  Unsupported,
  NotACriticalPoint,
  NoProfileBehavior,
  AsymmetricTensor,
  DegenerateSigns,
  StepLimitExceeded,
  BlowupInPhaseVariables,
  NonInvertibleOrbit,
  NoInterface,
  WrongInterfaceType,
  NegativeF,
  IntegrationFailure,
  BracketInvalid,
  Undecided,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace blowup
