#include "stylevis/prompt_synthesis.hpp"

#include "stylevis/digest.hpp"
#include "stylevis/text.hpp"

#include <json.hpp>

#include <set>

namespace stylevis::prompts {
namespace {

using nlohmann::json;

constexpr std::string_view kSystemPrompt = R"(You are an expert visual semiotician. Your task is to identify visual correlates for the textual stylistic cues in an author's writing style summary, and to translate that literary style into directions a text-to-image diffusion model can follow.

Mapping rules:
- Tone maps to visual mood and color palette.
- Recurring literary themes map to subject matter.
- Narrative complexity maps to artistic style and composition.

Synthesize the overall aesthetic essence and the recurring patterns of the style. Do not try to literally depict every individual claim or abstract plot mechanics; capture the feeling of the author's world instead.

Write exactly {prompt_count} distinct text-to-image prompts, each exploring a different visual facet of the same style. Each prompt must be a single comma-separated list of at least {min_descriptors} visual descriptors covering the main subject, mood, artistic style, lighting, and technical aspects (composition, detail, rendering).

Output format: respond with one JSON object and nothing else, of the form
{"prompts": ["<prompt 1>", "<prompt 2>", ...]}
The "prompts" array must contain exactly {prompt_count} strings.)";

/// Balanced {...} spans at nesting depth zero, skipping braces inside strings.
std::vector<std::string_view> object_candidates(std::string_view raw) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    const auto open = raw.find('{', i);
    if (open == std::string_view::npos) break;
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    std::size_t close = std::string_view::npos;
    for (std::size_t j = open; j < raw.size(); ++j) {
      const char c = raw[j];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}' && --depth == 0) {
        close = j;
        break;
      }
    }
    if (close == std::string_view::npos) {
      i = open + 1;
      continue;
    }
    out.push_back(raw.substr(open, close - open + 1));
    i = close + 1;
  }
  return out;
}

ParseResult fail(ValidationCode code, std::string detail) {
  ParseResult r;
  r.issue = ValidationIssue{code, std::move(detail)};
  return r;
}

}  // namespace

std::string_view default_system_prompt_template() { return kSystemPrompt; }

void SynthesisConfig::validate() const {
  if (prompt_count < 1) throw Error(ErrorKind::Config, "prompt_count must be >= 1");
  if (min_descriptors_per_prompt < 1) {
    throw Error(ErrorKind::Config, "min_descriptors_per_prompt must be >= 1");
  }
  if (max_retries < 0) throw Error(ErrorKind::Config, "max_retries must be >= 0");
  if (max_transport_retries < 0) {
    throw Error(ErrorKind::Config, "max_transport_retries must be >= 0");
  }
  if (system_prompt_template.find("{prompt_count}") == std::string::npos) {
    throw Error(ErrorKind::Config, "system prompt template must reference {prompt_count}");
  }
}

VisualPrompt VisualPrompt::from_rendered(std::string rendered) {
  VisualPrompt p;
  p.descriptors = text::split(rendered, ", ");
  p.rendered = std::move(rendered);
  return p;
}

std::string_view to_string(ValidationCode code) {
  switch (code) {
    case ValidationCode::NoObject: return "no_object";
    case ValidationCode::BadSchema: return "bad_schema";
    case ValidationCode::WrongCount: return "wrong_count";
    case ValidationCode::EmptyPrompt: return "empty_prompt";
    case ValidationCode::TooFewDescriptors: return "too_few_descriptors";
    case ValidationCode::EmptyDescriptor: return "empty_descriptor";
    case ValidationCode::DuplicatePrompt: return "duplicate_prompt";
  }
  return "unknown";
}

std::string ValidationIssue::repair_message(const SynthesisConfig& config) const {
  std::string fix;
  switch (code) {
    case ValidationCode::NoObject:
    case ValidationCode::BadSchema:
      fix = "Reply with a single JSON object of the form {\"prompts\": [\"...\"]}.";
      break;
    case ValidationCode::WrongCount:
      fix = "Return exactly " + std::to_string(config.prompt_count) + " prompts.";
      break;
    case ValidationCode::EmptyPrompt:
    case ValidationCode::EmptyDescriptor:
      fix = "Every prompt and every comma-separated descriptor must be non-empty.";
      break;
    case ValidationCode::TooFewDescriptors:
      fix = "Each prompt needs at least " + std::to_string(config.min_descriptors_per_prompt) +
            " comma-separated descriptors.";
      break;
    case ValidationCode::DuplicatePrompt:
      fix = "All prompts must be different from each other.";
      break;
  }
  return "Your previous reply was rejected (error code: " + std::string(to_string(code)) +
         "): " + detail + ". " + fix;
}

std::string build_system_prompt(const SynthesisConfig& config) {
  auto out = text::replace_all(config.system_prompt_template, "{prompt_count}",
                               std::to_string(config.prompt_count));
  return text::replace_all(std::move(out), "{min_descriptors}",
                           std::to_string(config.min_descriptors_per_prompt));
}

std::string build_user_message(const aws::CleanedSheet& sheet) {
  return "Author Writing Style Summary:\n\n" + sheet.narrative +
         "\n\nGenerate the text-to-image prompts for this author now.";
}

ParseResult parse_llm_response(std::string_view raw, const SynthesisConfig& config) {
  const auto candidates = object_candidates(raw);
  if (candidates.empty()) return fail(ValidationCode::NoObject, "no JSON object found in reply");

  std::optional<json> object;
  for (auto candidate : candidates) {
    auto parsed = json::parse(candidate.begin(), candidate.end(), nullptr, false);
    if (!parsed.is_discarded() && parsed.is_object()) {
      object = std::move(parsed);
      break;
    }
  }
  if (!object) return fail(ValidationCode::NoObject, "no object literal in reply parses as JSON");

  auto it = object->find("prompts");
  if (it == object->end() || !it->is_array()) {
    return fail(ValidationCode::BadSchema, "object has no \"prompts\" array");
  }

  std::vector<std::string> rendered;
  for (const auto& item : *it) {
    if (item.is_string()) {
      rendered.push_back(item.get<std::string>());
    } else if (item.is_object() && item.contains("prompt") && item.at("prompt").is_string()) {
      rendered.push_back(item.at("prompt").get<std::string>());
    } else {
      return fail(ValidationCode::BadSchema, "\"prompts\" entries must be strings");
    }
  }

  if (static_cast<int>(rendered.size()) != config.prompt_count) {
    return fail(ValidationCode::WrongCount, "expected " + std::to_string(config.prompt_count) +
                                                " prompts, got " +
                                                std::to_string(rendered.size()));
  }

  ParseResult result;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < rendered.size(); ++i) {
    const auto label = "prompt " + std::to_string(i + 1);
    auto normalized = text::collapse_whitespace(rendered[i]);
    if (normalized.empty()) return fail(ValidationCode::EmptyPrompt, label + " is empty");
    auto pieces = text::split(normalized, ",");
    for (auto& piece : pieces) piece = std::string(text::trim(piece));
    normalized = text::join(pieces, ", ");
    auto prompt = VisualPrompt::from_rendered(std::move(normalized));
    for (const auto& d : prompt.descriptors) {
      if (text::trim(d).empty()) {
        return fail(ValidationCode::EmptyDescriptor, label + " has an empty descriptor");
      }
    }
    if (static_cast<int>(prompt.descriptors.size()) < config.min_descriptors_per_prompt) {
      return fail(ValidationCode::TooFewDescriptors,
                  label + " has " + std::to_string(prompt.descriptors.size()) +
                      " descriptors, need " + std::to_string(config.min_descriptors_per_prompt));
    }
    if (!seen.insert(prompt.rendered).second) {
      return fail(ValidationCode::DuplicatePrompt, label + " repeats an earlier prompt");
    }
    result.prompts.push_back(std::move(prompt));
  }
  return result;
}

SynthesisFailure::SynthesisFailure(std::string author_id, std::vector<std::string> raw_attempts,
                                   ValidationIssue last_issue)
    : Error(ErrorKind::SynthesisFailure,
            "prompt synthesis for '" + author_id + "' failed after " +
                std::to_string(raw_attempts.size()) + " attempts (last error: " +
                std::string(to_string(last_issue.code)) + ": " + last_issue.detail + ")"),
      author_id_(std::move(author_id)),
      raw_attempts_(std::move(raw_attempts)),
      last_issue_(std::move(last_issue)) {}

PromptTriple synthesize_prompts(const aws::CleanedSheet& sheet, llm::LlmProvider& provider,
                                const SynthesisConfig& config) {
  config.validate();
  const auto system = build_system_prompt(config);
  std::string conversation = build_user_message(sheet);

  ProviderTrace trace;
  while (true) {
    std::string raw;
    try {
      raw = provider.complete(system, conversation, config.provider_params);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Provider) throw;
      if (++trace.transport_failures > config.max_transport_retries) {
        throw Error(ErrorKind::Provider, "provider unavailable for '" + sheet.author_id +
                                             "' after " +
                                             std::to_string(trace.transport_failures) +
                                             " transport failures: " + e.what());
      }
      continue;
    }
    ++trace.attempts;
    trace.raw_responses.push_back(raw);

    auto parsed = parse_llm_response(raw, config);
    if (parsed.ok()) {
      PromptTriple triple;
      triple.author_id = sheet.author_id;
      triple.prompts = std::move(parsed.prompts);
      triple.trace = std::move(trace);
      triple.provider = provider.name();
      triple.template_version = config.template_version;
      return triple;
    }
    if (trace.attempts > config.max_retries) {
      throw SynthesisFailure(sheet.author_id, std::move(trace.raw_responses), *parsed.issue);
    }
    conversation += "\n\n---\nYour previous reply:\n" + raw + "\n---\n" +
                    parsed.issue->repair_message(config);
  }
}

std::vector<SynthesisOutcome> synthesize_corpus(const std::vector<aws::CleanedSheet>& sheets,
                                                llm::LlmProvider& provider,
                                                const SynthesisConfig& config,
                                                const Execution& exec) {
  std::vector<SynthesisOutcome> out(sheets.size());
  for_each_index(sheets.size(), exec, [&](std::size_t i) {
    try {
      out[i].triple = synthesize_prompts(sheets[i], provider, config);
    } catch (const Error& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

std::string triple_to_json(const PromptTriple& triple) {
  json prompts = json::array();
  for (const auto& p : triple.prompts) prompts.push_back(p.rendered);
  json root = {
      {"author_id", triple.author_id},
      {"prompts", prompts},
      {"provider", triple.provider},
      {"template_version", triple.template_version},
      {"trace",
       {{"attempts", triple.trace.attempts},
        {"transport_failures", triple.trace.transport_failures},
        {"raw_responses", triple.trace.raw_responses}}},
  };
  return root.dump(2) + "\n";
}

PromptTriple triple_from_json(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
    PromptTriple t;
    t.author_id = root.at("author_id").get<std::string>();
    for (const auto& p : root.at("prompts")) {
      t.prompts.push_back(VisualPrompt::from_rendered(p.get<std::string>()));
    }
    t.provider = root.value("provider", "");
    t.template_version = root.value("template_version", "");
    if (auto it = root.find("trace"); it != root.end()) {
      t.trace.attempts = it->value("attempts", 0);
      t.trace.transport_failures = it->value("transport_failures", 0);
      t.trace.raw_responses = it->value("raw_responses", std::vector<std::string>{});
    }
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("prompt triple: ") + e.what());
  }
}

}  // namespace stylevis::prompts
