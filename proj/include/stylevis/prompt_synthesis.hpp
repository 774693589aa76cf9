#pragma once

#include "stylevis/aws_ingest.hpp"
#include "stylevis/error.hpp"
#include "stylevis/llm_provider.hpp"
#include "stylevis/parallel.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stylevis::prompts {

/// Version tag recorded next to every synthesized triple.
inline constexpr std::string_view kTemplateVersion = "semiotician-v1";

/// The shipped system prompt. Slots: {prompt_count}, {min_descriptors}.
std::string_view default_system_prompt_template();

struct SynthesisConfig {
  std::string system_prompt_template{default_system_prompt_template()};
  std::string template_version{kTemplateVersion};
  int prompt_count = 3;
  int min_descriptors_per_prompt = 5;
  int max_retries = 2;
  /// Transport failures are budgeted separately from validation retries.
  int max_transport_retries = 2;
  llm::Params provider_params;

  void validate() const;
};

/// A comma-separated descriptor list. `rendered` is the canonical string;
/// splitting it on ", " yields `descriptors` and joining gives it back.
struct VisualPrompt {
  std::vector<std::string> descriptors;
  std::string rendered;

  static VisualPrompt from_rendered(std::string rendered);
  bool operator==(const VisualPrompt&) const = default;
};

struct ProviderTrace {
  std::vector<std::string> raw_responses;
  int attempts = 0;
  int transport_failures = 0;

  bool operator==(const ProviderTrace&) const = default;
};

struct PromptTriple {
  std::string author_id;
  std::vector<VisualPrompt> prompts;
  ProviderTrace trace;
  std::string provider;
  std::string template_version;

  bool operator==(const PromptTriple&) const = default;
};

enum class ValidationCode {
  NoObject,           // format: nothing parseable as an object
  BadSchema,          // format: object without a prompts array of strings
  WrongCount,         // cardinality
  EmptyPrompt,
  TooFewDescriptors,  // sparsity
  EmptyDescriptor,    // sparsity
  DuplicatePrompt,    // distinctness
};

std::string_view to_string(ValidationCode code);

struct ValidationIssue {
  ValidationCode code;
  std::string detail;

  /// Message appended to the conversation so the model can fix its reply.
  std::string repair_message(const SynthesisConfig& config) const;
};

struct ParseResult {
  std::vector<VisualPrompt> prompts;
  std::optional<ValidationIssue> issue;

  bool ok() const { return !issue.has_value(); }
};

std::string build_system_prompt(const SynthesisConfig& config);
std::string build_user_message(const aws::CleanedSheet& sheet);

/// Extracts the first balanced object literal (ignoring surrounding prose)
/// and validates it against the config.
ParseResult parse_llm_response(std::string_view raw, const SynthesisConfig& config);

/// Thrown when every validation attempt was rejected. Carries all replies.
class SynthesisFailure : public Error {
 public:
  SynthesisFailure(std::string author_id, std::vector<std::string> raw_attempts,
                   ValidationIssue last_issue);

  const std::string& author_id() const { return author_id_; }
  const std::vector<std::string>& raw_attempts() const { return raw_attempts_; }
  const ValidationIssue& last_issue() const { return last_issue_; }

 private:
  std::string author_id_;
  std::vector<std::string> raw_attempts_;
  ValidationIssue last_issue_;
};

/// Runs the prompt/validate/repair loop against `provider`. Throws
/// SynthesisFailure after 1 + max_retries rejected replies, or
/// Error(Provider) after more than max_transport_retries transport errors.
PromptTriple synthesize_prompts(const aws::CleanedSheet& sheet, llm::LlmProvider& provider,
                                const SynthesisConfig& config);

struct SynthesisOutcome {
  std::optional<PromptTriple> triple;
  std::string error;  // empty on success
};

/// One outcome per sheet, index-aligned with the input.
std::vector<SynthesisOutcome> synthesize_corpus(const std::vector<aws::CleanedSheet>& sheets,
                                                llm::LlmProvider& provider,
                                                const SynthesisConfig& config,
                                                const Execution& exec);

std::string triple_to_json(const PromptTriple& triple);
PromptTriple triple_from_json(std::string_view json_text);

}  // namespace stylevis::prompts
