#include "stylevis/image_generation.hpp"

#include "stylevis/digest.hpp"
#include "stylevis/error.hpp"
#include "stylevis/manifest.hpp"
#include "stylevis/text.hpp"

#include <algorithm>

namespace stylevis::images {

std::vector<std::string> default_negative_prompt() { return {"lowres", "bad anatomy", "blurry"}; }

std::string GenerationParams::negative_prompt_text() const {
  return text::join(negative_prompt, ", ");
}

std::string assemble_final_prompt(std::string_view core, const GenerationParams& params) {
  if (text::trim(core).empty()) {
    throw Error(ErrorKind::Argument, "core prompt must be non-empty");
  }
  std::string out(core);
  if (!params.positive_modifiers.empty()) {
    out += ", ";
    out += params.positive_modifiers;
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t corpus_seed, std::string_view author_id,
                          int prompt_index) {
  const std::string key = std::to_string(corpus_seed) + ":" + std::string(author_id) + ":" +
                          std::to_string(prompt_index);
  return sha256_u64(key) & 0xffffffffULL;
}

std::filesystem::path image_relative_path(std::string_view author_id, int prompt_index,
                                          std::string_view extension) {
  return std::filesystem::path("images") / std::string(author_id) /
         (std::to_string(prompt_index) + "." + std::string(extension));
}

ImageArtifact generate_one(const prompts::PromptTriple& triple, int prompt_index,
                           ImageProvider& provider, const GenerationParams& params,
                           const std::filesystem::path& output_root, ManifestWriter* manifest) {
  if (prompt_index < 1 || prompt_index > static_cast<int>(triple.prompts.size())) {
    throw Error(ErrorKind::Argument, "prompt index out of range");
  }
  ImageArtifact a;
  a.author_id = triple.author_id;
  a.prompt_index = prompt_index;
  a.core_prompt = triple.prompts[static_cast<std::size_t>(prompt_index - 1)].rendered;
  a.final_prompt = assemble_final_prompt(a.core_prompt, params);
  a.negative_prompt = params.negative_prompt_text();
  a.seed = derive_seed(params.corpus_seed, a.author_id, prompt_index);
  a.model_id = params.model_id;

  ImageRequest request;
  request.final_prompt = a.final_prompt;
  if (provider.supports_negative_prompt()) request.negative_prompt = a.negative_prompt;
  request.seed = a.seed;
  request.size = params.size;
  request.extra = params.extra;

  try {
    const Bytes bytes = provider.generate(request);
    const auto rel = image_relative_path(a.author_id, prompt_index, provider.file_extension());
    fsutil::write_file_atomic(output_root / rel,
                              std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                               bytes.size()));
    a.image_path = rel.generic_string();
    a.content_digest = sha256_hex(std::span<const std::uint8_t>(bytes));
    a.status = ArtifactStatus::Ok;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Provider && e.kind() != ErrorKind::Io) throw;
    a.status = ArtifactStatus::Failed;
    a.error = e.what();
  }
  a.created_at = text::utc_timestamp();
  if (manifest) manifest->append(a);
  return a;
}

GenerationReport generate_images(const prompts::PromptTriple& triple, ImageProvider& provider,
                                 const GenerationParams& params,
                                 const std::filesystem::path& output_root,
                                 ManifestWriter* manifest) {
  GenerationReport report;
  for (int i = 1; i <= static_cast<int>(triple.prompts.size()); ++i) {
    auto a = generate_one(triple, i, provider, params, output_root, manifest);
    if (a.status == ArtifactStatus::Failed) ++report.failures;
    report.artifacts.push_back(std::move(a));
  }
  return report;
}

GenerationReport generate_corpus_images(const std::vector<prompts::PromptTriple>& triples,
                                        ImageProvider& provider, const GenerationParams& params,
                                        const std::filesystem::path& output_root,
                                        ManifestWriter* manifest, const Execution& exec) {
  struct Job {
    std::size_t triple;
    int index;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < triples.size(); ++t) {
    for (int i = 1; i <= static_cast<int>(triples[t].prompts.size()); ++i) jobs.push_back({t, i});
  }
  GenerationReport report;
  report.artifacts.resize(jobs.size());
  for_each_index(jobs.size(), exec, [&](std::size_t j) {
    report.artifacts[j] = generate_one(triples[jobs[j].triple], jobs[j].index, provider, params,
                                       output_root, manifest);
  });
  std::sort(report.artifacts.begin(), report.artifacts.end(), [](const auto& a, const auto& b) {
    return std::tie(a.author_id, a.prompt_index) < std::tie(b.author_id, b.prompt_index);
  });
  report.failures = static_cast<std::size_t>(
      std::count_if(report.artifacts.begin(), report.artifacts.end(),
                    [](const auto& a) { return a.status == ArtifactStatus::Failed; }));
  return report;
}

}  // namespace stylevis::images
