#include "stylevis/manifest.hpp"

#include "stylevis/digest.hpp"
#include "stylevis/error.hpp"
#include "stylevis/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>

namespace stylevis::images {
namespace {

using nlohmann::json;

std::string status_name(ArtifactStatus s) { return s == ArtifactStatus::Ok ? "ok" : "failed"; }

void sort_canonical(std::vector<ImageArtifact>& artifacts) {
  std::stable_sort(artifacts.begin(), artifacts.end(), [](const auto& a, const auto& b) {
    return std::tie(a.author_id, a.prompt_index) < std::tie(b.author_id, b.prompt_index);
  });
}

}  // namespace

std::string artifact_to_json_line(const ImageArtifact& a) {
  json j = {{"author_id", a.author_id},
            {"prompt_index", a.prompt_index},
            {"status", status_name(a.status)},
            {"core_prompt", a.core_prompt},
            {"final_prompt", a.final_prompt},
            {"negative_prompt", a.negative_prompt},
            {"seed", a.seed},
            {"model_id", a.model_id},
            {"image_path", a.image_path},
            {"content_digest", a.content_digest},
            {"created_at", a.created_at}};
  if (!a.error.empty()) j["error"] = a.error;
  return j.dump() + "\n";
}

ImageArtifact artifact_from_json_line(std::string_view line) {
  try {
    const auto j = json::parse(line.begin(), line.end());
    ImageArtifact a;
    a.author_id = j.at("author_id").get<std::string>();
    a.prompt_index = j.at("prompt_index").get<int>();
    const auto status = j.at("status").get<std::string>();
    if (status == "ok") a.status = ArtifactStatus::Ok;
    else if (status == "failed") a.status = ArtifactStatus::Failed;
    else throw Error(ErrorKind::Schema, "manifest: unknown status '" + status + "'");
    a.core_prompt = j.at("core_prompt").get<std::string>();
    a.final_prompt = j.at("final_prompt").get<std::string>();
    a.negative_prompt = j.at("negative_prompt").get<std::string>();
    a.seed = j.at("seed").get<std::uint64_t>();
    a.model_id = j.at("model_id").get<std::string>();
    a.image_path = j.at("image_path").get<std::string>();
    a.content_digest = j.at("content_digest").get<std::string>();
    a.created_at = j.at("created_at").get<std::string>();
    a.error = j.value("error", "");
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("manifest line: ") + e.what());
  }
}

ManifestWriter::ManifestWriter(const std::filesystem::path& path, Mode mode) : path_(path) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  const auto flags = std::ios::binary | (mode == Mode::Truncate ? std::ios::trunc : std::ios::app);
  out_.open(path_, flags);
  if (!out_) throw Error(ErrorKind::Io, "cannot open manifest " + path_.string());
}

void ManifestWriter::append(const ImageArtifact& artifact) {
  const auto line = artifact_to_json_line(artifact);
  std::lock_guard lock(mutex_);
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.flush();
  if (!out_) throw Error(ErrorKind::Io, "manifest append failed: " + path_.string());
}

void write_manifest(const std::vector<ImageArtifact>& artifacts,
                    const std::filesystem::path& path) {
  ManifestWriter writer(path, ManifestWriter::Mode::Append);
  for (const auto& a : artifacts) writer.append(a);
}

void rewrite_manifest_canonical(std::vector<ImageArtifact> artifacts,
                                const std::filesystem::path& path) {
  sort_canonical(artifacts);
  std::string contents;
  for (const auto& a : artifacts) contents += artifact_to_json_line(a);
  fsutil::write_file_atomic(path, contents);
}

std::vector<ImageArtifact> read_manifest(const std::filesystem::path& path,
                                         ManifestReadOptions options) {
  const std::string data = fsutil::read_file(path);
  std::map<std::pair<std::string, int>, ImageArtifact> latest;
  std::size_t line_no = 0;
  for (const auto& line : text::split(data, "\n")) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ImageArtifact a;
    try {
      a = artifact_from_json_line(line);
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const auto where = path.string() + ":" + std::to_string(line_no);
    if (a.author_id.empty()) throw Error(ErrorKind::Schema, where + ": empty author_id");
    if (a.prompt_index < 1) throw Error(ErrorKind::Schema, where + ": prompt_index must be >= 1");
    if (!a.final_prompt.starts_with(a.core_prompt)) {
      throw Error(ErrorKind::Schema, where + ": final_prompt does not extend core_prompt");
    }
    if (a.status == ArtifactStatus::Ok && (a.image_path.empty() || a.content_digest.empty())) {
      throw Error(ErrorKind::Schema, where + ": successful entry lacks image_path or digest");
    }
    latest[{a.author_id, a.prompt_index}] = std::move(a);
  }

  std::vector<ImageArtifact> out;
  out.reserve(latest.size());
  const auto root = path.parent_path();
  for (auto& [key, a] : latest) {
    if (options.verify_files && a.status == ArtifactStatus::Ok) {
      const auto file = root / a.image_path;
      std::error_code ec;
      if (!std::filesystem::is_regular_file(file, ec)) {
        throw Error(ErrorKind::Integrity, "manifest references missing image " + file.string());
      }
      if (sha256_hex(fsutil::read_file(file)) != a.content_digest) {
        throw Error(ErrorKind::Integrity, "digest mismatch for image " + file.string());
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace stylevis::images
