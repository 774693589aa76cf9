#pragma once

#include "stylevis/image_generation.hpp"
#include "stylevis/response_store.hpp"
#include "stylevis/study_design.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stylevis::survey {

struct ImageRef {
  int prompt_index = 0;
  char label = 'A';
  std::string url;
};

struct SessionItem {
  std::string item_id;
  std::string narrative;
  std::vector<ImageRef> images;
  bool completed = false;
};

struct SessionView {
  std::string rater_id;
  std::vector<SessionItem> items;
  std::size_t completed = 0;
  std::size_t total = 0;
};

std::string session_to_json(const SessionView& view);

/// Serves each rater their assigned author sets and accepts their answers.
class SurveyService {
 public:
  static constexpr int kImagesPerItem = 3;

  /// `narratives` maps item id to cleaned narrative; `artifacts` come from
  /// the image manifest and `output_root` is the directory it lives in.
  SurveyService(study::AssignmentPlan plan, std::map<std::string, std::string> narratives,
                std::vector<images::ImageArtifact> artifacts, std::filesystem::path output_root,
                ResponseStore& store);

  /// Throws Error(NotFound) for a rater absent from the plan.
  SessionView get_session(std::string_view rater_id) const;

  /// Throws Error(NotFound) for an unknown rater, Error(Authorization) when
  /// the item is not assigned to the rater, plus whatever the store throws.
  SurveyResponse submit(const ResponseDraft& draft);

  /// Absolute path of a generated image; Error(NotFound) when absent.
  std::filesystem::path image_file(std::string_view item_id, int prompt_index) const;

  std::string export_csv() const;

  const ResponseStore& store() const { return store_; }

 private:
  study::AssignmentPlan plan_;
  std::map<std::string, std::string> narratives_;
  std::map<std::pair<std::string, int>, images::ImageArtifact> images_;
  std::filesystem::path output_root_;
  ResponseStore& store_;
};

}  // namespace stylevis::survey
