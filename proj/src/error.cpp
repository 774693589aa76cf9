#include "stylevis/error.hpp"

namespace stylevis {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::EmptyCorpus: return "empty_corpus";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Authorization: return "authorization";
    case ErrorKind::Integrity: return "integrity";
    case ErrorKind::Provider: return "provider";
    case ErrorKind::SynthesisFailure: return "synthesis_failure";
    case ErrorKind::Config: return "config";
    case ErrorKind::StagedDependency: return "staged_dependency";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace stylevis
