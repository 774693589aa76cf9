#include "stylevis/survey_service.hpp"

#include "stylevis/error.hpp"

#include <json.hpp>

#include <algorithm>

namespace stylevis::survey {

std::string session_to_json(const SessionView& view) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : view.items) {
    nlohmann::json imgs = nlohmann::json::array();
    for (const auto& img : item.images) {
      imgs.push_back({{"prompt_index", img.prompt_index},
                      {"label", std::string(1, img.label)},
                      {"url", img.url}});
    }
    items.push_back({{"item_id", item.item_id},
                     {"narrative", item.narrative},
                     {"images", imgs},
                     {"completed", item.completed}});
  }
  nlohmann::json root = {{"rater_id", view.rater_id},
                         {"items", items},
                         {"progress", {{"completed", view.completed}, {"total", view.total}}}};
  return root.dump();
}

SurveyService::SurveyService(study::AssignmentPlan plan,
                             std::map<std::string, std::string> narratives,
                             std::vector<images::ImageArtifact> artifacts,
                             std::filesystem::path output_root, ResponseStore& store)
    : plan_(std::move(plan)),
      narratives_(std::move(narratives)),
      output_root_(std::move(output_root)),
      store_(store) {
  for (auto& a : artifacts) {
    if (a.status != images::ArtifactStatus::Ok) continue;
    images_[{a.author_id, a.prompt_index}] = std::move(a);
  }
}

SessionView SurveyService::get_session(std::string_view rater_id) const {
  const auto* assignment = plan_.find(rater_id);
  if (!assignment) throw Error(ErrorKind::NotFound, "unknown rater '" + std::string(rater_id) + "'");

  SessionView view;
  view.rater_id = assignment->rater_id;
  view.total = assignment->items.size();
  for (const auto& item_id : assignment->items) {
    SessionItem item;
    item.item_id = item_id;
    if (auto it = narratives_.find(item_id); it != narratives_.end()) item.narrative = it->second;
    for (int idx = 1; idx <= kImagesPerItem; ++idx) {
      item.images.push_back({idx, label_for_index(idx),
                             "/api/images/" + item_id + "/" + std::to_string(idx)});
    }
    item.completed = store_.contains(rater_id, item_id);
    if (item.completed) ++view.completed;
    view.items.push_back(std::move(item));
  }
  return view;
}

SurveyResponse SurveyService::submit(const ResponseDraft& draft) {
  const auto* assignment = plan_.find(draft.rater_id);
  if (!assignment) throw Error(ErrorKind::NotFound, "unknown rater '" + draft.rater_id + "'");
  if (std::find(assignment->items.begin(), assignment->items.end(), draft.item_id) ==
      assignment->items.end()) {
    throw Error(ErrorKind::Authorization,
                "item '" + draft.item_id + "' is not assigned to rater '" + draft.rater_id + "'");
  }
  return store_.append(draft);
}

std::filesystem::path SurveyService::image_file(std::string_view item_id, int prompt_index) const {
  auto it = images_.find({std::string(item_id), prompt_index});
  if (it == images_.end()) {
    throw Error(ErrorKind::NotFound, "no image " + std::to_string(prompt_index) + " for item '" +
                                         std::string(item_id) + "'");
  }
  return output_root_ / it->second.image_path;
}

std::string SurveyService::export_csv() const { return survey::export_csv(store_.snapshot()); }

}  // namespace stylevis::survey
