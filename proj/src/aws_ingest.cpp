#include "stylevis/aws_ingest.hpp"

#include "stylevis/digest.hpp"
#include "stylevis/error.hpp"
#include "stylevis/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace stylevis::aws {
namespace {

using nlohmann::json;

constexpr std::string_view kCategorySlot = "{category}";
constexpr std::string_view kClaimsSlot = "{claims}";
constexpr std::string_view kParagraphSeparator = "\n\n";

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Schema, path + ": " + what);
}

std::string require_text(const json& node, const std::string& path) {
  if (!node.is_string()) schema_error(path, "expected string");
  std::string value = node.get<std::string>();
  if (text::trim(value).empty()) schema_error(path, "must be non-empty");
  return value;
}

Claim parse_claim(const json& node, const std::string& path) {
  Claim claim;
  if (node.is_string()) {
    claim.text = require_text(node, path);
    return claim;
  }
  if (!node.is_object()) schema_error(path, "expected claim object or string");
  if (!node.contains("text")) schema_error(path + "/text", "missing");
  claim.text = require_text(node.at("text"), path + "/text");
  if (auto it = node.find("evidence"); it != node.end() && !it->is_null()) {
    if (it->is_string()) {
      claim.evidence_spans.push_back(it->get<std::string>());
    } else if (it->is_array()) {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const auto& span = (*it)[i];
        if (!span.is_string()) {
          schema_error(path + "/evidence/" + std::to_string(i), "expected string");
        }
        claim.evidence_spans.push_back(span.get<std::string>());
      }
    } else {
      schema_error(path + "/evidence", "expected string or array of strings");
    }
  }
  return claim;
}

std::string metadata_value(const json& value, const std::string& path) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_primitive()) return value.dump();
  schema_error(path, "metadata values must be scalars");
}

}  // namespace

bool is_path_safe_id(std::string_view id) {
  if (id.empty() || id.front() == '.' || id.size() > 200) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x20 && u != 0x7f && c != '/' && c != '\\' && c != ':';
  });
}

const std::vector<std::string>& default_category_vocabulary() {
  static const std::vector<std::string> vocab = {"Plot", "Creativity", "Development",
                                                 "Character and Setting", "Language Use"};
  return vocab;
}

RawAuthorSheet parse_raw_sheet(std::string_view document,
                               const std::vector<std::string>& vocabulary) {
  json root;
  try {
    root = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse,
                "malformed document at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!root.is_object()) schema_error("/", "expected object");

  RawAuthorSheet sheet;
  if (!root.contains("author_id")) schema_error("/author_id", "missing");
  sheet.author_id = require_text(root.at("author_id"), "/author_id");
  if (!is_path_safe_id(sheet.author_id)) {
    schema_error("/author_id", "'" + sheet.author_id + "' cannot be used as a file name");
  }

  if (!root.contains("categories")) schema_error("/categories", "missing");
  const auto& categories = root.at("categories");
  if (!categories.is_array()) schema_error("/categories", "expected array");
  if (categories.empty()) schema_error("/categories", "must be non-empty");

  for (std::size_t ci = 0; ci < categories.size(); ++ci) {
    const std::string path = "/categories/" + std::to_string(ci);
    const auto& node = categories[ci];
    if (!node.is_object()) schema_error(path, "expected object");
    if (!node.contains("name")) schema_error(path + "/name", "missing");
    CategorySection section;
    section.name = std::string(text::trim(require_text(node.at("name"), path + "/name")));
    if (!vocabulary.empty() &&
        std::find(vocabulary.begin(), vocabulary.end(), section.name) == vocabulary.end()) {
      schema_error(path + "/name", "category '" + section.name + "' not in vocabulary");
    }
    if (!node.contains("claims")) schema_error(path + "/claims", "missing");
    const auto& claims = node.at("claims");
    if (!claims.is_array()) schema_error(path + "/claims", "expected array");
    if (claims.empty()) schema_error(path + "/claims", "must be non-empty");
    for (std::size_t k = 0; k < claims.size(); ++k) {
      section.claims.push_back(parse_claim(claims[k], path + "/claims/" + std::to_string(k)));
    }
    sheet.categories.push_back(std::move(section));
  }

  if (auto it = root.find("metadata"); it != root.end() && !it->is_null()) {
    if (!it->is_object()) schema_error("/metadata", "expected object");
    for (const auto& [key, value] : it->items()) {
      sheet.metadata[key] = metadata_value(value, "/metadata/" + key);
    }
  }
  return sheet;
}

std::string serialize_raw_sheet(const RawAuthorSheet& sheet) {
  json root;
  root["author_id"] = sheet.author_id;
  root["categories"] = json::array();
  for (const auto& section : sheet.categories) {
    json claims = json::array();
    for (const auto& claim : section.claims) {
      json c = {{"text", claim.text}};
      if (!claim.evidence_spans.empty()) c["evidence"] = claim.evidence_spans;
      claims.push_back(std::move(c));
    }
    root["categories"].push_back({{"name", section.name}, {"claims", std::move(claims)}});
  }
  root["metadata"] = json::object();
  for (const auto& [k, v] : sheet.metadata) root["metadata"][k] = v;
  return root.dump();
}

CleaningRules CleaningRules::defaults() {
  CleaningRules rules;
  rules.strip_keys = {"timestamp", "created_at", "updated_at", "generated_at",
                      "tag",       "tags",       "structure",  "source"};
  rules.strip_patterns = {
      // structural tags: <combined-author-sheet>, </section>, <br/>
      R"(</?[A-Za-z][\w:.-]*(\s[^<>]*)?/?>)",
      R"(\bcombined-author-sheet\b)",
      // evidence annotations: [evidence: ...], [source 3], (evidence: ...)
      R"(\[\s*(evidence|source|ref|quote|citation)\b[^\]]*\])",
      R"(\(\s*(evidence|source)\s*:[^)]*\))",
      // ISO-8601 timestamps
      R"(\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)",
      // markdown emphasis and inline code markers
      R"(\*\*|__|`)",
      // brackets left empty by the removals above
      R"([<\[(]\s*[>\])])",
  };
  rules.join_template = "{category}: {claims}";
  return rules;
}

void CleaningRules::validate() const {
  for (const auto& p : strip_patterns) {
    try {
      std::regex re(p, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error(ErrorKind::Config, "strip pattern '" + p + "' does not compile: " + e.what());
    }
  }
  const auto cat = join_template.find(kCategorySlot);
  const auto claims = join_template.find(kClaimsSlot);
  if (cat == std::string::npos || claims == std::string::npos) {
    throw Error(ErrorKind::Config, "join_template must contain {category} and {claims}");
  }
  if (claims < cat + kCategorySlot.size()) {
    throw Error(ErrorKind::Config, "join_template must place {category} before {claims}");
  }
  if (text::trim(join_template.substr(cat + kCategorySlot.size(),
                                      claims - cat - kCategorySlot.size()))
          .empty()) {
    throw Error(ErrorKind::Config,
                "join_template needs a non-blank separator between {category} and {claims}");
  }
  if (join_template.find(kParagraphSeparator) != std::string::npos) {
    throw Error(ErrorKind::Config, "join_template may not contain a blank line");
  }
}

SheetCleaner::SheetCleaner(CleaningRules rules) : rules_(std::move(rules)) {
  rules_.validate();
  for (const auto& p : rules_.strip_patterns) {
    patterns_.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
  }
  const auto cat = rules_.join_template.find(kCategorySlot);
  const auto claims = rules_.join_template.find(kClaimsSlot);
  prefix_ = rules_.join_template.substr(0, cat);
  middle_ = rules_.join_template.substr(cat + kCategorySlot.size(),
                                        claims - cat - kCategorySlot.size());
  suffix_ = rules_.join_template.substr(claims + kClaimsSlot.size());
}

std::string SheetCleaner::clean_claim(std::string_view raw_text,
                                      const std::vector<std::string>& banned) const {
  // Removal can splice fragments into a fresh match, so iterate to a fixpoint.
  std::string current = text::collapse_whitespace(raw_text);
  while (true) {
    std::string next = current;
    for (const auto& re : patterns_) next = std::regex_replace(next, re, " ");
    for (const auto& value : banned) next = text::replace_all(std::move(next), value, " ");
    next = text::collapse_whitespace(next);
    if (next == current) return next;
    current = std::move(next);
  }
}

CleanedSheet SheetCleaner::clean(const RawAuthorSheet& raw) const {
  std::vector<std::string> banned;
  for (const auto& key : rules_.strip_keys) {
    auto it = raw.metadata.find(key);
    if (it == raw.metadata.end()) continue;
    auto value = std::string(text::trim(it->second));
    if (!value.empty()) banned.push_back(std::move(value));
  }

  std::vector<std::string> paragraphs;
  paragraphs.reserve(raw.categories.size());
  for (const auto& section : raw.categories) {
    std::vector<std::string> claims;
    for (const auto& claim : section.claims) {
      auto cleaned = clean_claim(claim.text, banned);
      if (!cleaned.empty()) claims.push_back(std::move(cleaned));
    }
    std::string paragraph = prefix_ + section.name + middle_ + text::join(claims, " ") + suffix_;
    paragraphs.push_back(text::collapse_whitespace(paragraph));
  }

  CleanedSheet out;
  out.author_id = raw.author_id;
  out.narrative = text::join(paragraphs, kParagraphSeparator);
  out.source_hash = sha256_hex(serialize_raw_sheet(raw));
  return out;
}

std::string SheetCleaner::rewrap(const CleanedSheet& cleaned) const {
  const auto collapsed_prefix = text::collapse_whitespace(prefix_);
  const auto collapsed_middle = text::collapse_whitespace(middle_);
  const auto collapsed_suffix = text::collapse_whitespace(suffix_);

  nlohmann::json root;
  root["author_id"] = cleaned.author_id;
  root["categories"] = nlohmann::json::array();
  for (const auto& paragraph : text::split(cleaned.narrative, kParagraphSeparator)) {
    std::string_view body = paragraph;
    if (!collapsed_prefix.empty() && body.starts_with(collapsed_prefix)) {
      body.remove_prefix(collapsed_prefix.size());
    }
    if (!collapsed_suffix.empty() && body.ends_with(collapsed_suffix)) {
      body.remove_suffix(collapsed_suffix.size());
    }
    std::string_view name = body;
    std::string_view claims;
    // Middle may be pure whitespace (collapsed to ""); fall back to the first space.
    const std::string_view sep = collapsed_middle.empty() ? std::string_view(" ")
                                                          : std::string_view(collapsed_middle);
    if (auto pos = body.find(sep); pos != std::string_view::npos) {
      name = body.substr(0, pos);
      claims = body.substr(pos + sep.size());
    }
    nlohmann::json section = {{"name", std::string(text::trim(name))},
                              {"claims", nlohmann::json::array()}};
    if (!text::trim(claims).empty()) section["claims"].push_back(std::string(text::trim(claims)));
    root["categories"].push_back(std::move(section));
  }
  root["metadata"] = nlohmann::json::object();
  return root.dump(2);
}

CleanedSheet clean_sheet(const RawAuthorSheet& raw, const CleaningRules& rules) {
  return SheetCleaner(rules).clean(raw);
}

Corpus load_corpus(const std::filesystem::path& directory,
                   const std::vector<std::string>& vocabulary) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw Error(ErrorKind::Io, "corpus directory not found: " + directory.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename().string().starts_with(".")) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Corpus corpus;
  std::set<std::string> seen;
  for (const auto& file : files) {
    try {
      auto sheet = parse_raw_sheet(fsutil::read_file(file), vocabulary);
      if (!seen.insert(sheet.author_id).second) {
        corpus.errors.push_back({file, "duplicate author_id '" + sheet.author_id + "'"});
        continue;
      }
      corpus.sheets.push_back(std::move(sheet));
    } catch (const Error& e) {
      corpus.errors.push_back({file, e.what()});
    }
  }
  if (corpus.sheets.empty()) {
    throw Error(ErrorKind::EmptyCorpus, "no valid author sheets in " + directory.string() +
                                            " (" + std::to_string(corpus.errors.size()) +
                                            " file errors)");
  }
  std::sort(corpus.sheets.begin(), corpus.sheets.end(),
            [](const auto& a, const auto& b) { return a.author_id < b.author_id; });
  return corpus;
}

std::vector<CleanedSheet> clean_corpus(const std::vector<RawAuthorSheet>& sheets,
                                       const SheetCleaner& cleaner, const Execution& exec) {
  std::vector<CleanedSheet> out(sheets.size());
  for_each_index(sheets.size(), exec, [&](std::size_t i) { out[i] = cleaner.clean(sheets[i]); });
  return out;
}

}  // namespace stylevis::aws
