#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stylevis::survey {

/// Q3 answer. Images are numbered 1..3 in storage and export; the rater UI
/// labels them A, B, C in the same order.
enum class Favorite { None = 0, Image1 = 1, Image2 = 2, Image3 = 3 };

std::string_view to_string(Favorite f);  // "1", "2", "3", "none"
std::optional<Favorite> favorite_from_string(std::string_view s);
std::optional<Favorite> favorite_from_label(char label);  // 'A'..'C'
char label_for_index(int prompt_index);                   // 1..3 -> 'A'..'C'

struct Q2Entry {
  std::string element;
  std::string reflection;

  bool operator==(const Q2Entry&) const = default;
};

/// A submission before the store assigns id and timestamp.
struct ResponseDraft {
  std::string rater_id;
  std::string item_id;
  int rating = 0;  // Q1, 1..5
  std::array<Q2Entry, 2> q2;
  Favorite favorite = Favorite::None;
  std::string favorite_justification;
  int distinctiveness = 0;  // Q4, 1..5

  bool operator==(const ResponseDraft&) const = default;
};

struct SurveyResponse {
  std::uint64_t id = 0;
  ResponseDraft answers;
  std::string submitted_at;

  const std::string& rater_id() const { return answers.rater_id; }
  const std::string& item_id() const { return answers.item_id; }

  bool operator==(const SurveyResponse&) const = default;
};

/// Range and enumeration checks; throws Error(Validation) naming the field.
void validate_draft(const ResponseDraft& draft);

/// Append-only response collection with a (rater_id, item_id) uniqueness
/// index. With a backing file every accepted record is fsync'd before
/// append() returns; existing records are loaded on construction.
class ResponseStore {
 public:
  ResponseStore() = default;
  explicit ResponseStore(std::filesystem::path journal);

  ResponseStore(const ResponseStore&) = delete;
  ResponseStore& operator=(const ResponseStore&) = delete;

  /// Atomic check-and-append. Throws Error(Validation) on bad fields and
  /// Error(Conflict) when the pair already has a response.
  SurveyResponse append(const ResponseDraft& draft);

  /// For tests and imports: keeps the given id and timestamp.
  SurveyResponse append_with(const ResponseDraft& draft, std::string submitted_at);

  std::vector<SurveyResponse> snapshot() const;  // sorted by id
  bool contains(std::string_view rater_id, std::string_view item_id) const;
  std::size_t size() const;

 private:
  SurveyResponse append_locked(const ResponseDraft& draft, std::string submitted_at);
  void persist(const SurveyResponse& r);

  std::optional<std::filesystem::path> journal_;
  mutable std::mutex mutex_;
  std::vector<SurveyResponse> records_;
  std::set<std::pair<std::string, std::string>> index_;
  std::uint64_t next_id_ = 1;
};

std::string response_to_json(const SurveyResponse& r);
SurveyResponse response_from_json(std::string_view json_text);

/// Parses a POST body; throws Error(Validation) on missing or mistyped fields.
ResponseDraft draft_from_json(std::string_view json_text);

inline constexpr std::string_view kCsvHeader =
    "id,rater-id,item-id,rating,favorite-image-id,distinctiveness,q2-element-1,"
    "q2-reflection-1,q2-element-2,q2-reflection-2,q3-justification,submitted-at";

/// Header plus one row per response, ordered by id.
std::string export_csv(std::vector<SurveyResponse> responses);

}  // namespace stylevis::survey
