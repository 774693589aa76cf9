#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stylevis {

enum class ErrorKind {
  Parse,
  Schema,
  EmptyCorpus,
  Argument,
  Infeasible,
  NotFound,
  Conflict,
  Validation,
  Authorization,
  Integrity,
  Provider,
  SynthesisFailure,
  Config,
  StagedDependency,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure the library reports. `kind` is what
/// callers branch on (HTTP status, CLI exit code); the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace stylevis
