#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dimkit {

enum class ErrorCode {
  Domain,               // point outside a finite domain
  Representation,       // malformed class, oracle arity mismatch, duplicates
  Arity,                // tuple lengths disagree
  Precondition,         // caller violated an operation's precondition
  Shattered,            // canonical witness found no excluded output
  WitnessViolation,     // witness output is realized by the class
  NflFailure,           // adversary exhausted all mixtures below 1/4
  Budget,               // enumeration budget exhausted
  InternalConsistency,  // a proven bound failed to hold
  Unsupported,          // e.g. unbounded alphabet without a label bound
  LearnerContract,      // learner output not evaluable on the sample domain
  Schema,               // input file does not match its schema
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dimkit
