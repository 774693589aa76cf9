#include "stylevis/llm_provider.hpp"

#include "stylevis/digest.hpp"
#include "stylevis/error.hpp"
#include "stylevis/text.hpp"

#include <httplib.h>
#include <json.hpp>

#include <array>

namespace stylevis::llm {
namespace {

constexpr std::array kSubjects = {
    "lantern-lit harbor town",        "overgrown observatory ruins",
    "crowded midnight market",        "lone lighthouse on a basalt cliff",
    "library with spiraling shelves", "rain-soaked rooftop garden",
    "abandoned clockwork workshop",   "candlelit council chamber",
    "mist-covered mountain monastery", "neon-drenched back alley",
    "sunken cathedral beneath a lake", "caravan crossing a salt desert",
};
constexpr std::array kDetails = {
    "floating paper lanterns",      "scattered handwritten letters",
    "tangled brass machinery",      "silhouetted figures in debate",
    "drifting embers",              "cracked mirrors reflecting other rooms",
    "hidden doorways in the walls", "flocks of origami birds",
};
constexpr std::array kMoods = {
    "melancholic yet hopeful mood", "tense suspenseful atmosphere",
    "whimsical dreamlike mood",     "brooding introspective atmosphere",
    "warm nostalgic mood",          "uneasy surreal atmosphere",
};
constexpr std::array kPalettes = {
    "muted teal and amber palette", "deep indigo and gold palette",
    "soft pastel color palette",    "high-contrast crimson and black palette",
    "earthy ochre and moss palette",
};
constexpr std::array kStyles = {
    "painterly oil illustration style", "cinematic film noir style",
    "stylized watercolor illustration", "art nouveau poster style",
    "surreal magical realism",          "detailed ink and wash style",
};
constexpr std::array kLighting = {
    "dramatic chiaroscuro lighting", "soft twilight glow",
    "volumetric god rays",           "flickering candlelight",
    "cold moonlight",
};
constexpr std::array kComposition = {
    "dynamic diagonal composition", "symmetrical centered composition",
    "wide establishing shot",       "intimate close framing",
    "layered depth with foreground silhouettes",
};

template <std::size_t N>
const char* pick(const std::array<const char*, N>& pool, std::uint64_t h, std::size_t offset) {
  return pool[(h + offset) % N];
}

}  // namespace

std::string MockLlmProvider::complete(std::string_view /*system*/, std::string_view user,
                                      const Params& /*params*/) {
  ++calls_;
  const std::uint64_t h = sha256_u64(user);
  nlohmann::json prompts = nlohmann::json::array();
  for (int k = 0; k < prompt_count_; ++k) {
    const auto off = static_cast<std::size_t>(k);
    // consecutive subject indices keep prompts distinct for k < |kSubjects|
    std::vector<std::string> parts = {
        kSubjects[(h + off) % kSubjects.size()],
        pick(kDetails, h >> 8, off * 3),
        pick(kMoods, h >> 16, off * 5),
        pick(kPalettes, h >> 24, off),
        pick(kStyles, h >> 32, off * 2),
        pick(kLighting, h >> 40, off),
        pick(kComposition, h >> 48, off),
    };
    if (k >= static_cast<int>(kSubjects.size())) parts.push_back("variation " + std::to_string(k));
    prompts.push_back(text::join(parts, ", "));
  }
  return "Here are the visual prompts for this author:\n" +
         nlohmann::json{{"prompts", prompts}}.dump(2) + "\n";
}

ScriptedLlmProvider::ScriptedLlmProvider(std::vector<std::string> steps)
    : steps_(std::move(steps)) {
  if (steps_.empty()) throw Error(ErrorKind::Argument, "scripted provider needs at least one step");
}

ScriptedLlmProvider ScriptedLlmProvider::from_files(
    const std::vector<std::filesystem::path>& files) {
  std::vector<std::string> steps;
  for (const auto& f : files) steps.push_back(fsutil::read_file(f));
  return ScriptedLlmProvider(std::move(steps));
}

std::string ScriptedLlmProvider::complete(std::string_view, std::string_view user,
                                          const Params&) {
  std::string step;
  {
    std::lock_guard lock(mutex_);
    seen_.emplace_back(user);
    step = steps_[std::min(next_, steps_.size() - 1)];
    ++next_;
  }
  if (step.starts_with("!transport")) {
    throw Error(ErrorKind::Provider, "scripted transport failure");
  }
  return step;
}

std::size_t ScriptedLlmProvider::call_count() const {
  std::lock_guard lock(mutex_);
  return next_;
}

std::vector<std::string> ScriptedLlmProvider::seen_user_messages() const {
  std::lock_guard lock(mutex_);
  return seen_;
}

std::pair<std::string, std::string> split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorKind::Config, "endpoint URL lacks a scheme: " + std::string(url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

std::string HttpLlmProvider::complete(std::string_view system, std::string_view user,
                                      const Params& params) {
  const auto [base, path] = split_url(endpoint_.url);
  httplib::Client client(base);
  client.set_read_timeout(endpoint_.timeout_seconds, 0);
  client.set_connection_timeout(10, 0);
  httplib::Headers headers;
  if (!endpoint_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
  }
  nlohmann::json body = {{"model", endpoint_.model},
                         {"system", std::string(system)},
                         {"user", std::string(user)},
                         {"params", params}};
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::Provider,
                "LLM request to " + endpoint_.url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::Provider,
                "LLM endpoint returned HTTP " + std::to_string(res->status));
  }
  return res->body;
}

}  // namespace stylevis::llm
