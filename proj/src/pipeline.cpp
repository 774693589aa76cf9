#include "stylevis/pipeline.hpp"

#include "stylevis/error.hpp"
#include "stylevis/manifest.hpp"
#include "stylevis/response_store.hpp"
#include "stylevis/study_design.hpp"
#include "stylevis/text.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>

namespace stylevis::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

ProviderConfig parse_provider(const json& j, ProviderConfig defaults) {
  defaults.kind = j.value("provider", defaults.kind);
  defaults.url = j.value("url", defaults.url);
  defaults.model = j.value("model", defaults.model);
  defaults.api_key_env = j.value("api_key_env", defaults.api_key_env);
  defaults.extension = j.value("extension", defaults.extension);
  defaults.negative_prompt_supported =
      j.value("negative_prompt_supported", defaults.negative_prompt_supported);
  defaults.timeout_seconds = j.value("timeout_seconds", defaults.timeout_seconds);
  return defaults;
}

std::string require_env(const std::string& var, const char* what) {
  if (var.empty()) {
    throw Error(ErrorKind::Config, std::string(what) + ": api_key_env is not configured");
  }
  const char* value = std::getenv(var.c_str());
  if (!value || !*value) {
    throw Error(ErrorKind::Config,
                std::string(what) + ": credential environment variable " + var + " is not set");
  }
  return value;
}

void require_artifact(const fs::path& root, const fs::path& rel, const char* producer) {
  std::error_code ec;
  if (!fs::exists(root / rel, ec)) {
    throw Error(ErrorKind::StagedDependency, "missing " + (root / rel).string() + " (run `" +
                                                 producer + "` first)");
  }
}

Execution exec_for(const RunFlags& flags) { return Execution::parallel(flags.parallel); }

std::vector<std::string> default_raters() {
  std::vector<std::string> ids;
  for (int i = 1; i <= 10; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "r%02d", i);
    ids.emplace_back(buf);
  }
  return ids;
}

std::vector<std::string> cleaned_author_ids(const fs::path& root) {
  require_artifact(root, layout::kCleanedIndex, "ingest");
  const auto index = json::parse(fsutil::read_file(root / layout::kCleanedIndex));
  std::vector<std::string> ids;
  for (const auto& entry : index.at("sheets")) ids.push_back(entry.at("author_id").get<std::string>());
  return ids;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(std::string_view json_text, const fs::path& base_dir) {
  PipelineConfig c;
  try {
    const auto j = json::parse(json_text.begin(), json_text.end());
    if (!j.is_object()) throw Error(ErrorKind::Config, "config root must be an object");
    if (j.contains("corpus_dir")) c.corpus_dir = resolve(base_dir, j.at("corpus_dir"));
    if (j.contains("output_root")) c.output_root = resolve(base_dir, j.at("output_root"));

    if (auto it = j.find("ingest"); it != j.end()) {
      c.vocabulary = it->value("vocabulary", c.vocabulary);
      c.cleaning.strip_keys = it->value("strip_keys", c.cleaning.strip_keys);
      c.cleaning.strip_patterns = it->value("strip_patterns", c.cleaning.strip_patterns);
      c.cleaning.join_template = it->value("join_template", c.cleaning.join_template);
    }
    if (auto it = j.find("llm"); it != j.end()) {
      c.llm = parse_provider(*it, c.llm);
      c.synthesis.provider_params = it->value("params", c.synthesis.provider_params);
    }
    if (auto it = j.find("synthesis"); it != j.end()) {
      auto& s = c.synthesis;
      s.prompt_count = it->value("prompt_count", s.prompt_count);
      s.min_descriptors_per_prompt = it->value("min_descriptors_per_prompt", s.min_descriptors_per_prompt);
      s.max_retries = it->value("max_retries", s.max_retries);
      s.max_transport_retries = it->value("max_transport_retries", s.max_transport_retries);
      if (it->contains("system_prompt_file")) {
        s.system_prompt_template =
            fsutil::read_file(resolve(base_dir, it->at("system_prompt_file")));
        s.template_version = it->value("template_version", std::string("custom"));
      }
    }
    if (auto it = j.find("image"); it != j.end()) c.image = parse_provider(*it, c.image);
    if (auto it = j.find("generation"); it != j.end()) {
      auto& g = c.generation;
      g.model_id = it->value("model_id", c.image.model.empty() ? g.model_id : c.image.model);
      g.positive_modifiers = it->value("positive_modifiers", g.positive_modifiers);
      g.negative_prompt = it->value("negative_prompt", g.negative_prompt);
      g.corpus_seed = it->value("corpus_seed", g.corpus_seed);
      g.size.width = it->value("width", g.size.width);
      g.size.height = it->value("height", g.size.height);
      g.extra = it->value("extra", g.extra);
    } else if (!c.image.model.empty()) {
      c.generation.model_id = c.image.model;
    }
    if (auto it = j.find("study"); it != j.end()) {
      c.rater_ids = it->value("rater_ids", c.rater_ids);
      if (c.rater_ids.empty() && it->contains("rater_count")) {
        const int n = it->at("rater_count").get<int>();
        for (int i = 1; i <= n; ++i) {
          char buf[16];
          std::snprintf(buf, sizeof buf, "r%02d", i);
          c.rater_ids.emplace_back(buf);
        }
      }
      c.coverage = it->value("coverage", c.coverage);
      c.study_seed = it->value("seed", c.study_seed);
    }
    if (auto it = j.find("report"); it != j.end()) {
      const auto sd = it->value("sd_convention", std::string("sample"));
      if (sd == "sample") c.report.sd = metrics::SdConvention::Sample;
      else if (sd == "population") c.report.sd = metrics::SdConvention::Population;
      else throw Error(ErrorKind::Config, "report.sd_convention must be sample or population");
    }
    if (auto it = j.find("serve"); it != j.end()) {
      c.serve.host = it->value("host", c.serve.host);
      c.serve.port = it->value("port", c.serve.port);
      c.serve.admin_token_env = it->value("admin_token_env", c.serve.admin_token_env);
      if (it->contains("ui_dir")) c.serve.ui_dir = resolve(base_dir, it->at("ui_dir"));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("config: ") + e.what());
  }
  if (c.rater_ids.empty()) c.rater_ids = default_raters();
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& file) {
  std::string text;
  try {
    text = fsutil::read_file(file);
  } catch (const Error&) {
    throw Error(ErrorKind::Config, "cannot read config file " + file.string());
  }
  return from_json(text, file.parent_path());
}

void PipelineConfig::validate() const {
  for (const auto* p : {&llm, &image}) {
    if (p->kind != "http" && p->kind != "mock") {
      throw Error(ErrorKind::Config, "provider must be \"http\" or \"mock\", got \"" + p->kind + "\"");
    }
  }
  try {
    cleaning.validate();
    synthesis.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  if (coverage < 1) throw Error(ErrorKind::Config, "study.coverage must be >= 1");
  if (generation.size.width <= 0 || generation.size.height <= 0) {
    throw Error(ErrorKind::Config, "generation width/height must be positive");
  }
}

PipelineConfig apply_flags(PipelineConfig config, const RunFlags& flags) {
  if (flags.seed) {
    config.study_seed = *flags.seed;
    config.generation.corpus_seed = *flags.seed;
  }
  if (flags.out) config.output_root = *flags.out;
  if (flags.corpus) config.corpus_dir = *flags.corpus;
  if (config.rater_ids.empty()) config.rater_ids = default_raters();
  return config;
}

std::unique_ptr<llm::LlmProvider> make_llm_provider(const PipelineConfig& config, bool mock) {
  if (mock || config.llm.kind == "mock") {
    return std::make_unique<llm::MockLlmProvider>(config.synthesis.prompt_count);
  }
  if (config.llm.url.empty()) throw Error(ErrorKind::Config, "llm.url is not configured");
  return std::make_unique<llm::HttpLlmProvider>(llm::HttpEndpoint{
      config.llm.url, config.llm.model, require_env(config.llm.api_key_env, "llm"),
      config.llm.timeout_seconds});
}

std::unique_ptr<images::ImageProvider> make_image_provider(const PipelineConfig& config,
                                                           bool mock) {
  if (mock || config.image.kind == "mock") return std::make_unique<images::MockImageProvider>();
  if (config.image.url.empty()) throw Error(ErrorKind::Config, "image.url is not configured");
  return std::make_unique<images::HttpImageProvider>(images::HttpImageEndpoint{
      config.image.url, config.image.model, require_env(config.image.api_key_env, "image"),
      config.image.extension, config.image.negative_prompt_supported,
      config.image.timeout_seconds});
}

StageResult run_ingest(const PipelineConfig& config, const RunFlags& flags, std::ostream& log) {
  const auto corpus = aws::load_corpus(config.corpus_dir, config.vocabulary);
  const aws::SheetCleaner cleaner(config.cleaning);
  const auto cleaned = aws::clean_corpus(corpus.sheets, cleaner, exec_for(flags));

  for (const auto& e : corpus.errors) log << "ingest: skipped " << e.path.string() << ": " << e.message << "\n";
  std::string summary = "ingest: " + std::to_string(cleaned.size()) + " sheets cleaned, " +
                        std::to_string(corpus.errors.size()) + " files rejected";
  if (flags.dry_run) return {0, summary + " (dry run, nothing written)"};

  const auto& root = config.output_root;
  json index = {{"sheets", json::array()}};
  for (const auto& c : cleaned) {
    const auto rel = layout::kCleanedDir / (c.author_id + ".txt");
    fsutil::write_file_atomic(root / rel, c.narrative + "\n");
    index["sheets"].push_back(
        {{"author_id", c.author_id}, {"source_hash", c.source_hash}, {"file", rel.generic_string()}});
  }
  json errors = json::array();
  for (const auto& e : corpus.errors) {
    errors.push_back({{"file", e.path.filename().string()}, {"error", e.message}});
  }
  fsutil::write_file_atomic(root / layout::kCleanedIndex, index.dump(2) + "\n");
  fsutil::write_file_atomic(root / layout::kIngestErrors, errors.dump(2) + "\n");
  return {0, summary};
}

std::map<std::string, std::string> load_cleaned_narratives(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& id : cleaned_author_ids(root)) {
    const auto file = root / layout::kCleanedDir / (id + ".txt");
    std::string narrative;
    try {
      narrative = fsutil::read_file(file);
    } catch (const Error&) {
      throw Error(ErrorKind::StagedDependency, "missing " + file.string() + " (rerun `ingest`)");
    }
    while (!narrative.empty() && narrative.back() == '\n') narrative.pop_back();
    out[id] = std::move(narrative);
  }
  return out;
}

StageResult run_prompts(const PipelineConfig& config, const RunFlags& flags,
                        llm::LlmProvider& provider, std::ostream& log) {
  const auto& root = config.output_root;
  const auto narratives = load_cleaned_narratives(root);
  const auto index = json::parse(fsutil::read_file(root / layout::kCleanedIndex));

  std::vector<aws::CleanedSheet> sheets;
  for (const auto& entry : index.at("sheets")) {
    const auto id = entry.at("author_id").get<std::string>();
    sheets.push_back({id, narratives.at(id), entry.at("source_hash").get<std::string>()});
  }
  if (flags.dry_run) {
    return {0, "prompts: would synthesize " + std::to_string(sheets.size()) + " triples with " +
                   provider.name() + " (dry run)"};
  }

  const auto outcomes =
      prompts::synthesize_corpus(sheets, provider, config.synthesis, exec_for(flags));
  json done = json::array();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& outcome = outcomes[i];
    if (!outcome.triple) {
      ++failed;
      log << "prompts: " << sheets[i].author_id << ": " << outcome.error << "\n";
      continue;
    }
    const auto rel = layout::kPromptsDir / (outcome.triple->author_id + ".json");
    fsutil::write_file_atomic(root / rel, prompts::triple_to_json(*outcome.triple));
    done.push_back({{"author_id", outcome.triple->author_id}, {"file", rel.generic_string()}});
  }
  json index_out = {{"template_version", config.synthesis.template_version},
                    {"provider", provider.name()},
                    {"triples", done}};
  fsutil::write_file_atomic(root / layout::kPromptsIndex, index_out.dump(2) + "\n");
  return {failed ? 1 : 0, "prompts: " + std::to_string(done.size()) + " triples, " +
                              std::to_string(failed) + " failures"};
}

std::vector<prompts::PromptTriple> load_prompt_triples(const fs::path& root) {
  require_artifact(root, layout::kPromptsIndex, "prompts");
  const auto index = json::parse(fsutil::read_file(root / layout::kPromptsIndex));
  std::vector<prompts::PromptTriple> out;
  for (const auto& entry : index.at("triples")) {
    const auto file = root / entry.at("file").get<std::string>();
    std::string data;
    try {
      data = fsutil::read_file(file);
    } catch (const Error&) {
      throw Error(ErrorKind::StagedDependency, "missing " + file.string() + " (rerun `prompts`)");
    }
    out.push_back(prompts::triple_from_json(data));
  }
  return out;
}

StageResult run_images(const PipelineConfig& config, const RunFlags& flags,
                       images::ImageProvider& provider, std::ostream& log) {
  const auto& root = config.output_root;
  const auto triples = load_prompt_triples(root);
  std::size_t prompt_total = 0;
  for (const auto& t : triples) prompt_total += t.prompts.size();
  if (flags.dry_run) {
    return {0, "images: would render " + std::to_string(prompt_total) + " images with " +
                   provider.name() + " (dry run)"};
  }

  images::GenerationReport report;
  {
    images::ManifestWriter writer(root / layout::kManifest, images::ManifestWriter::Mode::Truncate);
    report = images::generate_corpus_images(triples, provider, config.generation, root, &writer,
                                            exec_for(flags));
  }
  images::rewrite_manifest_canonical(report.artifacts, root / layout::kManifest);
  for (const auto& a : report.artifacts) {
    if (a.status == images::ArtifactStatus::Failed) {
      log << "images: " << a.author_id << "#" << a.prompt_index << ": " << a.error << "\n";
    }
  }
  const std::size_t ok = report.artifacts.size() - report.failures;
  return {report.failures ? 1 : 0, "images: " + std::to_string(ok) + " generated, " +
                                       std::to_string(report.failures) + " failed"};
}

StageResult run_assign(const PipelineConfig& config, const RunFlags& flags, std::ostream& log) {
  study::StudyConfig sc;
  sc.item_ids = cleaned_author_ids(config.output_root);
  sc.rater_ids = config.rater_ids;
  sc.coverage = config.coverage;
  sc.shuffle_seed = config.study_seed;
  const auto plan = study::make_assignment(sc);
  const auto violations = study::validate_assignment(plan, sc);
  for (const auto& v : violations) log << "assign: violation " << v.rule << ": " << v.message << "\n";
  if (!violations.empty()) return {1, "assign: plan failed validation"};
  log << study::plan_summary(plan);
  if (!flags.dry_run) {
    fsutil::write_file_atomic(config.output_root / layout::kPlan, study::plan_to_json(plan));
  }
  return {0, "assign: " + std::to_string(plan.total_slots()) + " slots over " +
                 std::to_string(plan.per_rater.size()) + " raters" +
                 (flags.dry_run ? " (dry run)" : "")};
}

StageResult run_export(const PipelineConfig& config, const RunFlags& flags, std::ostream&) {
  const auto& root = config.output_root;
  require_artifact(root, layout::kPlan, "assign");
  survey::ResponseStore store(root / layout::kJournal);
  const auto csv_text = survey::export_csv(store.snapshot());
  if (!flags.dry_run) fsutil::write_file_atomic(root / layout::kResponsesCsv, csv_text);
  return {0, "export: " + std::to_string(store.size()) + " responses"};
}

StageResult run_report(const PipelineConfig& config, const RunFlags& flags,
                       const std::optional<fs::path>& input, std::ostream& log) {
  const auto& root = config.output_root;
  const fs::path csv_path = input ? *input : root / layout::kResponsesCsv;
  std::error_code ec;
  if (!fs::exists(csv_path, ec)) {
    throw Error(ErrorKind::StagedDependency, "missing " + csv_path.string() + " (run `export` first)");
  }
  const auto responses = metrics::load_responses_csv(fsutil::read_file(csv_path));
  const auto report = metrics::build_report(responses, config.report);
  log << metrics::report_summary(report);
  if (!flags.dry_run) {
    fsutil::write_file_atomic(root / layout::kReport, metrics::report_to_json(report));
    fsutil::write_file_atomic(root / layout::kHistogram, metrics::histogram_csv(report));
    fsutil::write_file_atomic(root / layout::kScatter, metrics::scatter_csv(report));
  }
  return {0, "report: " + std::to_string(report.n_items) + " paired items from " +
                 std::to_string(report.n_responses) + " responses"};
}

StageResult run_all(const PipelineConfig& config, const RunFlags& flags,
                    llm::LlmProvider& llm_provider, images::ImageProvider& image_provider,
                    std::ostream& log) {
  std::string summary;
  auto step = [&](StageResult r) {
    log << r.summary << "\n";
    summary += (summary.empty() ? "" : "; ") + r.summary;
    return r.exit_code == 0;
  };
  if (!step(run_ingest(config, flags, log))) return {1, summary};
  if (flags.dry_run) {
    // later stages read artifacts a dry run never writes
    return {0, summary + "; remaining stages skipped (dry run)"};
  }
  if (!step(run_prompts(config, flags, llm_provider, log))) return {1, summary};
  if (!step(run_images(config, flags, image_provider, log))) return {1, summary};
  if (!step(run_assign(config, flags, log))) return {1, summary};
  return {0, summary};
}

}  // namespace stylevis::pipeline
