#pragma once

#include <stdexcept>
#include <string>

namespace spine {

enum class ErrorCode {
  Domain,
  EmptyPopulation,
  UnknownLabel,
  ModelShape,
  Capacity,
  NotIrreducible,
  NoConvergence,
  NoNullVector,
  PositivityLoss,
  MajorantExceeded,
  AssumptionViolated,
  DegenerateSample,
  Config,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace spine
