#pragma once

#include "stylevis/image_provider.hpp"
#include "stylevis/parallel.hpp"
#include "stylevis/prompt_synthesis.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace stylevis::images {

inline constexpr std::string_view kDefaultPositiveModifiers =
    "8k, highly detailed, masterpiece, perfect composition, intricate details, "
    "professional quality, cinematic lighting";

std::vector<std::string> default_negative_prompt();  // lowres, bad anatomy, blurry

struct GenerationParams {
  std::string model_id = "stable-diffusion-3.5-medium";
  std::string positive_modifiers{kDefaultPositiveModifiers};
  std::vector<std::string> negative_prompt = default_negative_prompt();
  std::uint64_t corpus_seed = 0;
  ImageSize size;
  std::map<std::string, std::string> extra;

  std::string negative_prompt_text() const;
};

/// core + ", " + modifiers, or core alone when the modifier string is empty.
/// Throws Error(Argument) on an empty core.
std::string assemble_final_prompt(std::string_view core, const GenerationParams& params);

/// Stable per-image seed: 32 bits of SHA-256("<corpus_seed>:<author_id>:<index>").
std::uint64_t derive_seed(std::uint64_t corpus_seed, std::string_view author_id, int prompt_index);

enum class ArtifactStatus { Ok, Failed };

struct ImageArtifact {
  std::string author_id;
  int prompt_index = 0;  // 1-based, matches prompt order
  std::string core_prompt;
  std::string final_prompt;
  std::string negative_prompt;
  std::uint64_t seed = 0;
  std::string model_id;
  std::string image_path;  // relative to the output root; empty when failed
  std::string content_digest;
  std::string created_at;
  ArtifactStatus status = ArtifactStatus::Ok;
  std::string error;

  bool operator==(const ImageArtifact&) const = default;
};

class ManifestWriter;

/// Relative path of an image: images/<author_id>/<index>.<ext>
std::filesystem::path image_relative_path(std::string_view author_id, int prompt_index,
                                          std::string_view extension);

/// Generates one image for prompt `prompt_index` (1-based) of `triple`,
/// writing the file under `output_root` and appending to `manifest` when it
/// is non-null. Provider failures yield a Failed artifact instead of throwing.
ImageArtifact generate_one(const prompts::PromptTriple& triple, int prompt_index,
                           ImageProvider& provider, const GenerationParams& params,
                           const std::filesystem::path& output_root, ManifestWriter* manifest);

struct GenerationReport {
  std::vector<ImageArtifact> artifacts;
  std::size_t failures = 0;
};

/// One artifact per prompt, in prompt order. Failures are isolated per prompt.
GenerationReport generate_images(const prompts::PromptTriple& triple, ImageProvider& provider,
                                 const GenerationParams& params,
                                 const std::filesystem::path& output_root,
                                 ManifestWriter* manifest = nullptr);

/// Flattens every (author, prompt) pair into one job list and runs it under
/// `exec`. Artifacts come back ordered by (author_id, prompt_index).
GenerationReport generate_corpus_images(const std::vector<prompts::PromptTriple>& triples,
                                        ImageProvider& provider, const GenerationParams& params,
                                        const std::filesystem::path& output_root,
                                        ManifestWriter* manifest, const Execution& exec);

}  // namespace stylevis::images
