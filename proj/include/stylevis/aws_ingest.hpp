#pragma once

#include "stylevis/parallel.hpp"

#include <filesystem>
#include <map>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

/// Author Writing Sheet ingestion: parsing raw per-author documents and
/// distilling them into a single narrative block for the prompt stage.
namespace stylevis::aws {

struct Claim {
  std::string text;
  std::vector<std::string> evidence_spans;

  bool operator==(const Claim&) const = default;
};

struct CategorySection {
  std::string name;
  std::vector<Claim> claims;

  bool operator==(const CategorySection&) const = default;
};

struct RawAuthorSheet {
  std::string author_id;
  std::vector<CategorySection> categories;
  std::map<std::string, std::string> metadata;

  bool operator==(const RawAuthorSheet&) const = default;
};

/// Ids become file names downstream: no separators, control characters or
/// leading dot.
bool is_path_safe_id(std::string_view id);

/// Plot, Creativity, Development, Character and Setting, Language Use.
const std::vector<std::string>& default_category_vocabulary();

/// Parses one author document:
///
///   {"author_id": "...",
///    "categories": [{"name": "Plot", "claims": [{"text": "...", "evidence": ["..."]}]}],
///    "metadata": {"timestamp": "..."}}
///
/// A claim may also be a bare string, and `evidence` a single string.
/// Malformed input throws Error(Parse) with the byte offset; structural
/// violations throw Error(Schema) with the JSON path. An empty vocabulary
/// accepts any category name.
RawAuthorSheet parse_raw_sheet(std::string_view document,
                               const std::vector<std::string>& vocabulary =
                                   default_category_vocabulary());

/// Canonical JSON for a sheet (sorted keys, no insignificant whitespace).
std::string serialize_raw_sheet(const RawAuthorSheet& sheet);

struct CleaningRules {
  /// Metadata keys whose values must not survive into the narrative.
  std::vector<std::string> strip_keys;
  /// ECMAScript regexes (matched case-insensitively) removed from claim text.
  std::vector<std::string> strip_patterns;
  /// Must contain {category} followed later by {claims}.
  std::string join_template;

  static CleaningRules defaults();

  /// Throws Error(Config) when a pattern fails to compile or the template
  /// lacks either slot.
  void validate() const;
};

struct CleanedSheet {
  std::string author_id;
  std::string narrative;
  std::string source_hash;

  bool operator==(const CleanedSheet&) const = default;
};

/// Compiled form of CleaningRules, shareable across threads.
class SheetCleaner {
 public:
  explicit SheetCleaner(CleaningRules rules);

  CleanedSheet clean(const RawAuthorSheet& raw) const;

  /// Reverses the join so that a narrative can be fed back through
  /// parse_raw_sheet. One claim per category, holding the joined claims.
  std::string rewrap(const CleanedSheet& cleaned) const;

  const CleaningRules& rules() const { return rules_; }

 private:
  std::string clean_claim(std::string_view text, const std::vector<std::string>& banned) const;

  CleaningRules rules_;
  std::vector<std::regex> patterns_;
  std::string prefix_;
  std::string middle_;
  std::string suffix_;
};

CleanedSheet clean_sheet(const RawAuthorSheet& raw, const CleaningRules& rules);

struct CorpusFileError {
  std::filesystem::path path;
  std::string message;
};

struct Corpus {
  std::vector<RawAuthorSheet> sheets;  // sorted by author_id
  std::vector<CorpusFileError> errors;
};

/// Loads every regular, non-hidden file in `directory`. Unreadable or
/// invalid files (and duplicate author ids) are collected in `errors`.
/// Throws Error(EmptyCorpus) when no sheet loads, Error(Io) when the
/// directory is missing.
Corpus load_corpus(const std::filesystem::path& directory,
                   const std::vector<std::string>& vocabulary = default_category_vocabulary());

/// Cleans every sheet; output index matches input index.
std::vector<CleanedSheet> clean_corpus(const std::vector<RawAuthorSheet>& sheets,
                                       const SheetCleaner& cleaner, const Execution& exec);

}  // namespace stylevis::aws
