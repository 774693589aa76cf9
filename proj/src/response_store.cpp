#include "stylevis/response_store.hpp"

#include "stylevis/csv.hpp"
#include "stylevis/error.hpp"
#include "stylevis/text.hpp"

#include <json.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

namespace stylevis::survey {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Validation, field + ": " + what);
}

json draft_json(const ResponseDraft& d) {
  return {{"rater_id", d.rater_id},
          {"item_id", d.item_id},
          {"rating", d.rating},
          {"q2",
           json::array({{{"element", d.q2[0].element}, {"reflection", d.q2[0].reflection}},
                        {{"element", d.q2[1].element}, {"reflection", d.q2[1].reflection}}})},
          {"favorite_image_id", std::string(to_string(d.favorite))},
          {"favorite_justification", d.favorite_justification},
          {"distinctiveness", d.distinctiveness}};
}

std::string string_field(const json& j, const char* key, bool required) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) invalid(key, "missing");
    return {};
  }
  if (!it->is_string()) invalid(key, "expected string");
  return it->get<std::string>();
}

int int_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) invalid(key, "missing");
  if (!it->is_number_integer()) invalid(key, "expected integer");
  return it->get<int>();
}

}  // namespace

std::string_view to_string(Favorite f) {
  switch (f) {
    case Favorite::Image1: return "1";
    case Favorite::Image2: return "2";
    case Favorite::Image3: return "3";
    case Favorite::None: return "none";
  }
  return "none";
}

std::optional<Favorite> favorite_from_string(std::string_view s) {
  if (s == "1") return Favorite::Image1;
  if (s == "2") return Favorite::Image2;
  if (s == "3") return Favorite::Image3;
  if (s == "none") return Favorite::None;
  return std::nullopt;
}

std::optional<Favorite> favorite_from_label(char label) {
  switch (label) {
    case 'A': return Favorite::Image1;
    case 'B': return Favorite::Image2;
    case 'C': return Favorite::Image3;
    default: return std::nullopt;
  }
}

char label_for_index(int prompt_index) {
  if (prompt_index < 1 || prompt_index > 26) {
    throw Error(ErrorKind::Argument, "prompt index has no label");
  }
  return static_cast<char>('A' + prompt_index - 1);
}

void validate_draft(const ResponseDraft& d) {
  if (d.rater_id.empty()) invalid("rater_id", "missing");
  if (d.item_id.empty()) invalid("item_id", "missing");
  if (d.rating < 1 || d.rating > 5) invalid("rating", "must be in 1..5");
  if (d.distinctiveness < 1 || d.distinctiveness > 5) invalid("distinctiveness", "must be in 1..5");
  switch (d.favorite) {
    case Favorite::None:
    case Favorite::Image1:
    case Favorite::Image2:
    case Favorite::Image3:
      break;
    default:
      invalid("favorite_image_id", "must be 1, 2, 3 or none");
  }
}

ResponseStore::ResponseStore(std::filesystem::path journal) : journal_(std::move(journal)) {
  std::error_code ec;
  if (!std::filesystem::exists(*journal_, ec)) return;
  const auto data = fsutil::read_file(*journal_);
  for (const auto& line : text::split(data, "\n")) {
    if (text::trim(line).empty()) continue;
    auto r = response_from_json(line);
    if (!index_.emplace(r.rater_id(), r.item_id()).second) {
      throw Error(ErrorKind::Integrity, "journal has duplicate response for (" + r.rater_id() +
                                            ", " + r.item_id() + ")");
    }
    next_id_ = std::max(next_id_, r.id + 1);
    records_.push_back(std::move(r));
  }
  std::sort(records_.begin(), records_.end(), [](auto& a, auto& b) { return a.id < b.id; });
}

SurveyResponse ResponseStore::append(const ResponseDraft& draft) {
  validate_draft(draft);
  std::lock_guard lock(mutex_);
  return append_locked(draft, text::utc_timestamp());
}

SurveyResponse ResponseStore::append_with(const ResponseDraft& draft, std::string submitted_at) {
  validate_draft(draft);
  std::lock_guard lock(mutex_);
  return append_locked(draft, std::move(submitted_at));
}

SurveyResponse ResponseStore::append_locked(const ResponseDraft& draft,
                                            std::string submitted_at) {
  const auto key = std::make_pair(draft.rater_id, draft.item_id);
  if (index_.count(key)) {
    throw Error(ErrorKind::Conflict, "response already recorded for rater '" + draft.rater_id +
                                         "' on item '" + draft.item_id + "'");
  }
  SurveyResponse r{next_id_, draft, std::move(submitted_at)};
  persist(r);
  ++next_id_;
  index_.insert(key);
  records_.push_back(r);
  return r;
}

void ResponseStore::persist(const SurveyResponse& r) {
  if (!journal_) return;
  const std::string line = response_to_json(r) + "\n";
  if (journal_->has_parent_path()) std::filesystem::create_directories(journal_->parent_path());
  const int fd = ::open(journal_->c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorKind::Io, "open " + journal_->string() + ": " + std::strerror(errno));
  std::size_t done = 0;
  while (done < line.size()) {
    const auto n = ::write(fd, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error(ErrorKind::Io, "write " + journal_->string() + ": " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
  const bool synced = ::fsync(fd) == 0;
  ::close(fd);
  if (!synced) throw Error(ErrorKind::Io, "fsync " + journal_->string() + " failed");
}

std::vector<SurveyResponse> ResponseStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return records_;
}

bool ResponseStore::contains(std::string_view rater_id, std::string_view item_id) const {
  std::lock_guard lock(mutex_);
  return index_.count({std::string(rater_id), std::string(item_id)}) > 0;
}

std::size_t ResponseStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::string response_to_json(const SurveyResponse& r) {
  json j = draft_json(r.answers);
  j["id"] = r.id;
  j["submitted_at"] = r.submitted_at;
  return j.dump();
}

SurveyResponse response_from_json(std::string_view json_text) {
  SurveyResponse r;
  r.answers = draft_from_json(json_text);
  const auto j = json::parse(json_text.begin(), json_text.end());
  if (!j.contains("id") || !j.at("id").is_number_unsigned()) invalid("id", "missing");
  r.id = j.at("id").get<std::uint64_t>();
  r.submitted_at = string_field(j, "submitted_at", true);
  return r;
}

ResponseDraft draft_from_json(std::string_view json_text) {
  json j = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) invalid("body", "expected a JSON object");

  ResponseDraft d;
  d.rater_id = string_field(j, "rater_id", true);
  d.item_id = string_field(j, "item_id", true);
  d.rating = int_field(j, "rating");
  d.distinctiveness = int_field(j, "distinctiveness");

  auto fav = j.find("favorite_image_id");
  if (fav == j.end()) invalid("favorite_image_id", "missing");
  std::optional<Favorite> parsed;
  if (fav->is_string()) parsed = favorite_from_string(fav->get<std::string>());
  else if (fav->is_number_integer()) {
    const int v = fav->get<int>();
    if (v >= 1 && v <= 3) parsed = static_cast<Favorite>(v);
  }
  if (!parsed) invalid("favorite_image_id", "must be 1, 2, 3 or none");
  d.favorite = *parsed;
  d.favorite_justification = string_field(j, "favorite_justification", false);

  auto q2 = j.find("q2");
  if (q2 == j.end() || !q2->is_array() || q2->size() != 2) {
    invalid("q2", "expected exactly two element/reflection pairs");
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& entry = (*q2)[i];
    if (!entry.is_object()) invalid("q2", "entries must be objects");
    d.q2[i].element = string_field(entry, "element", true);
    d.q2[i].reflection = string_field(entry, "reflection", false);
  }
  return d;
}

std::string export_csv(std::vector<SurveyResponse> responses) {
  std::sort(responses.begin(), responses.end(), [](auto& a, auto& b) { return a.id < b.id; });
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : responses) {
    const auto& a = r.answers;
    out += csv::format_row({std::to_string(r.id), a.rater_id, a.item_id, std::to_string(a.rating),
                            std::string(to_string(a.favorite)), std::to_string(a.distinctiveness),
                            a.q2[0].element, a.q2[0].reflection, a.q2[1].element,
                            a.q2[1].reflection, a.favorite_justification, r.submitted_at});
  }
  return out;
}

}  // namespace stylevis::survey
