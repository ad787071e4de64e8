#pragma once

#include <stdexcept>
#include <string>

namespace bellising {

enum class ErrorKind {
  InvalidArgument,
  InvalidConfiguration,
  InvalidSpec,
  Parse,
  EnumerationLimit,
  NumericRange,
  ZeroMeasure,
  Degenerate,
  Precondition,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidConfiguration: return "invalid-configuration";
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::EnumerationLimit: return "enumeration-limit";
    case ErrorKind::NumericRange: return "numeric-range";
    case ErrorKind::ZeroMeasure: return "zero-measure-condition";
    case ErrorKind::Degenerate: return "degenerate-model";
    case ErrorKind::Precondition: return "precondition";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace bellising
