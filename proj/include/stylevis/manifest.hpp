#pragma once

#include "stylevis/image_generation.hpp"

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace stylevis::images {

/// Line-delimited JSON, one ImageArtifact per line.
std::string artifact_to_json_line(const ImageArtifact& artifact);
ImageArtifact artifact_from_json_line(std::string_view line);

/// Single-writer append handle; each append writes and flushes one whole
/// line under a lock.
class ManifestWriter {
 public:
  enum class Mode { Append, Truncate };

  explicit ManifestWriter(const std::filesystem::path& path, Mode mode = Mode::Append);

  void append(const ImageArtifact& artifact);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
};

/// Appends every artifact to the manifest at `path` (created if absent).
void write_manifest(const std::vector<ImageArtifact>& artifacts,
                    const std::filesystem::path& path);

/// Atomically replaces `path` with the artifacts in (author_id,
/// prompt_index) order.
void rewrite_manifest_canonical(std::vector<ImageArtifact> artifacts,
                                const std::filesystem::path& path);

struct ManifestReadOptions {
  /// Check that every successful entry's file exists under the manifest's
  /// directory and hashes to content_digest.
  bool verify_files = true;
};

/// Reads and validates a manifest. A later line for the same
/// (author_id, prompt_index) supersedes an earlier one. Result is ordered
/// by (author_id, prompt_index). Throws Error(Parse) on a bad line,
/// Error(Schema) on an invariant violation, Error(Integrity) on a missing
/// or mismatched image file.
std::vector<ImageArtifact> read_manifest(const std::filesystem::path& path,
                                         ManifestReadOptions options = {});

}  // namespace stylevis::images
