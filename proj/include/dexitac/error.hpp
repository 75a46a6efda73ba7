#pragma once

#include <stdexcept>
#include <string>

namespace dexitac {

// Base of every error raised by the library. Each module throws the
// narrow subtype so callers can react per failure kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DEXITAC_DEFINE_ERROR(Name)         \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// tactile
DEXITAC_DEFINE_ERROR(EmptyFrame);
DEXITAC_DEFINE_ERROR(BadCrop);
DEXITAC_DEFINE_ERROR(EmptyMarkerSet);
DEXITAC_DEFINE_ERROR(NonMonotonicTime);
DEXITAC_DEFINE_ERROR(ImageFormatError);

// kinematics
DEXITAC_DEFINE_ERROR(PressureOutOfRange);

// plant
DEXITAC_DEFINE_ERROR(InvalidSelector);

// control
DEXITAC_DEFINE_ERROR(StaleFlags);
DEXITAC_DEFINE_ERROR(NoDisturbance);
DEXITAC_DEFINE_ERROR(ProtocolError);
DEXITAC_DEFINE_ERROR(ScenarioError);

// config validation, shared by all modules
DEXITAC_DEFINE_ERROR(ConfigError);

#undef DEXITAC_DEFINE_ERROR

// Scenario parsing. Carries the offending line for diagnostics.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// A scenario that parsed but breaks an invariant.
class ValidationError : public ScenarioError {
 public:
  using ScenarioError::ScenarioError;
};

}  // namespace dexitac
