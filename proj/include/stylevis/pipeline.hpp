#pragma once

#include "stylevis/aws_ingest.hpp"
#include "stylevis/evaluation_metrics.hpp"
#include "stylevis/image_generation.hpp"
#include "stylevis/image_provider.hpp"
#include "stylevis/llm_provider.hpp"
#include "stylevis/parallel.hpp"
#include "stylevis/prompt_synthesis.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace stylevis::pipeline {

struct ProviderConfig {
  std::string kind = "http";  // http | mock
  std::string url;
  std::string model;
  std::string api_key_env;
  std::string extension = "png";  // image providers only
  bool negative_prompt_supported = true;
  int timeout_seconds = 120;
};

struct ServeConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string admin_token_env = "STYLEVIS_ADMIN_TOKEN";
  std::filesystem::path ui_dir;
};

struct PipelineConfig {
  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path output_root = "out";
  std::vector<std::string> vocabulary = aws::default_category_vocabulary();
  aws::CleaningRules cleaning = aws::CleaningRules::defaults();
  ProviderConfig llm{.api_key_env = "STYLEVIS_LLM_API_KEY"};
  ProviderConfig image{.api_key_env = "STYLEVIS_IMAGE_API_KEY", .timeout_seconds = 300};
  prompts::SynthesisConfig synthesis;
  images::GenerationParams generation;
  std::vector<std::string> rater_ids;  // defaults to r01..r10
  int coverage = 2;
  std::uint64_t study_seed = 0;
  metrics::ReportOptions report;
  ServeConfig serve;

  /// Parses the JSON config file format; relative paths resolve against
  /// `base_dir`. Throws Error(Config) on type errors or invalid values.
  static PipelineConfig from_json(std::string_view json_text,
                                  const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& file);

  void validate() const;
};

/// Command-line overrides shared by every stage.
struct RunFlags {
  bool mock = false;
  bool dry_run = false;
  std::optional<std::uint64_t> seed;
  int parallel = 1;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> corpus;
};

/// Applies flag overrides (seed, output root, corpus dir) to a config.
PipelineConfig apply_flags(PipelineConfig config, const RunFlags& flags);

/// Stable artifact names under the output root.
namespace layout {
inline const std::filesystem::path kCleanedDir = "cleaned";
inline const std::filesystem::path kCleanedIndex = "cleaned/index.json";
inline const std::filesystem::path kIngestErrors = "cleaned/errors.json";
inline const std::filesystem::path kPromptsDir = "prompts";
inline const std::filesystem::path kPromptsIndex = "prompts/index.json";
inline const std::filesystem::path kManifest = "manifest.jsonl";
inline const std::filesystem::path kPlan = "plan.json";
inline const std::filesystem::path kJournal = "responses.jsonl";
inline const std::filesystem::path kResponsesCsv = "responses.csv";
inline const std::filesystem::path kReport = "report.json";
inline const std::filesystem::path kHistogram = "report_histogram.csv";
inline const std::filesystem::path kScatter = "report_scatter.csv";
}  // namespace layout

/// Builds the LLM provider: the deterministic mock under --mock or
/// kind == "mock", otherwise HTTP with the key read from the configured
/// environment variable. Throws Error(Config) when the key is absent.
std::unique_ptr<llm::LlmProvider> make_llm_provider(const PipelineConfig& config, bool mock);
std::unique_ptr<images::ImageProvider> make_image_provider(const PipelineConfig& config, bool mock);

struct StageResult {
  int exit_code = 0;  // 0 ok, 1 stage failure
  std::string summary;
};

/// Stage drivers. Each reads prior-stage artifacts from the output root and
/// throws Error(StagedDependency) naming the first missing file.
StageResult run_ingest(const PipelineConfig& config, const RunFlags& flags, std::ostream& log);
StageResult run_prompts(const PipelineConfig& config, const RunFlags& flags,
                        llm::LlmProvider& provider, std::ostream& log);
StageResult run_images(const PipelineConfig& config, const RunFlags& flags,
                       images::ImageProvider& provider, std::ostream& log);
StageResult run_assign(const PipelineConfig& config, const RunFlags& flags, std::ostream& log);
StageResult run_export(const PipelineConfig& config, const RunFlags& flags, std::ostream& log);
StageResult run_report(const PipelineConfig& config, const RunFlags& flags,
                       const std::optional<std::filesystem::path>& input, std::ostream& log);

/// ingest -> prompts -> images -> assign, stopping at the first failure.
StageResult run_all(const PipelineConfig& config, const RunFlags& flags,
                    llm::LlmProvider& llm_provider, images::ImageProvider& image_provider,
                    std::ostream& log);

/// Loads cleaned narratives keyed by author id from the ingest output.
std::map<std::string, std::string> load_cleaned_narratives(const std::filesystem::path& root);

/// Loads every triple named in prompts/index.json.
std::vector<prompts::PromptTriple> load_prompt_triples(const std::filesystem::path& root);

}  // namespace stylevis::pipeline
