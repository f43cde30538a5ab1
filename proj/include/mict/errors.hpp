#pragma once

#include <stdexcept>
#include <string>

namespace mict {

enum class ErrorKind {
  InvalidProposal,
  EmptyRegion,
  ContractViolation,
  MissingFeature,
  TemplateIncomplete,
  UnderDetermined,
  Domain,
  SizeLimit,
  NoLocalization,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers (and the CLI
/// exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

}  // namespace mict
