#include "stylevis/study_design.hpp"

#include "stylevis/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace stylevis::study {

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::Argument, "SeededRng::below(0)");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

void StudyConfig::validate() const {
  if (coverage < 1) throw Error(ErrorKind::Config, "coverage must be >= 1");
  auto check_unique = [](const std::vector<std::string>& ids, const char* what) {
    std::set<std::string> seen;
    for (const auto& id : ids) {
      if (id.empty()) throw Error(ErrorKind::Config, std::string("empty ") + what + " id");
      if (!seen.insert(id).second) {
        throw Error(ErrorKind::Config, std::string("duplicate ") + what + " id '" + id + "'");
      }
    }
  };
  check_unique(item_ids, "item");
  check_unique(rater_ids, "rater");
  if (static_cast<std::size_t>(coverage) > rater_ids.size()) {
    throw Error(ErrorKind::Infeasible, "coverage " + std::to_string(coverage) + " exceeds " +
                                           std::to_string(rater_ids.size()) + " raters");
  }
}

const RaterAssignment* AssignmentPlan::find(std::string_view rater_id) const {
  for (const auto& r : per_rater) {
    if (r.rater_id == rater_id) return &r;
  }
  return nullptr;
}

std::size_t AssignmentPlan::total_slots() const {
  std::size_t n = 0;
  for (const auto& r : per_rater) n += r.items.size();
  return n;
}

std::size_t rater_quota(std::size_t items, std::size_t raters, int coverage) {
  if (raters == 0) return 0;
  const std::size_t total = items * static_cast<std::size_t>(coverage);
  return (total + raters - 1) / raters;
}

std::size_t remainder_floor(std::size_t items, std::size_t raters, int coverage) {
  if (raters == 0) return 0;
  const std::size_t total = items * static_cast<std::size_t>(coverage);
  const std::size_t full = (raters - 1) * rater_quota(items, raters, coverage);
  return total > full ? total - full : 0;
}

AssignmentPlan make_assignment(const StudyConfig& config) {
  config.validate();
  SeededRng rng(config.shuffle_seed);

  auto raters = config.rater_ids;
  auto items = config.item_ids;
  rng.shuffle(raters);
  rng.shuffle(items);

  const std::size_t n = items.size();
  const std::size_t r = raters.size();
  const auto cov = static_cast<std::size_t>(config.coverage);
  const std::size_t total = n * cov;
  const std::size_t quota = rater_quota(n, r, config.coverage);

  AssignmentPlan plan;
  plan.coverage = config.coverage;
  plan.seed = config.shuffle_seed;
  for (const auto& id : raters) plan.per_rater.push_back({id, {}});

  const bool single_remainder = n == 0 || total > (r - 1) * quota;
  if (single_remainder) {
    // Copy-major slot order puts the copies of one item exactly n slots
    // apart; quota <= n whenever coverage <= raters, so they land in
    // different raters' blocks.
    for (std::size_t pos = 0; pos < total; ++pos) {
      const auto& item = items[pos % n];
      plan.per_rater[pos / quota].items.push_back(item);
    }
  } else {
    // Item-major round-robin: consecutive slots hit distinct raters.
    for (std::size_t pos = 0; pos < total; ++pos) {
      plan.per_rater[pos % r].items.push_back(items[pos / cov]);
    }
  }
  for (auto& ra : plan.per_rater) rng.shuffle(ra.items);
  return plan;
}

std::vector<Violation> validate_assignment(const AssignmentPlan& plan, const StudyConfig& config) {
  std::vector<Violation> out;
  const std::set<std::string> items(config.item_ids.begin(), config.item_ids.end());
  const std::set<std::string> raters(config.rater_ids.begin(), config.rater_ids.end());

  std::set<std::string> plan_raters;
  std::map<std::string, std::set<std::string>> holders;
  for (const auto& ra : plan.per_rater) {
    if (!raters.count(ra.rater_id)) {
      out.push_back({"unknown_rater", {ra.rater_id}, "rater not in study config"});
    }
    if (!plan_raters.insert(ra.rater_id).second) {
      out.push_back({"duplicate", {ra.rater_id}, "rater listed twice in plan"});
    }
    std::set<std::string> own;
    for (const auto& item : ra.items) {
      if (!items.count(item)) {
        out.push_back({"unknown_item", {ra.rater_id, item}, "item not in study config"});
      }
      if (!own.insert(item).second) {
        out.push_back({"duplicate", {ra.rater_id, item}, "item assigned twice to one rater"});
      }
      holders[item].insert(ra.rater_id);
    }
  }
  for (const auto& rater : config.rater_ids) {
    if (!plan_raters.count(rater)) {
      out.push_back({"missing_rater", {rater}, "configured rater absent from plan"});
    }
  }
  for (const auto& item : config.item_ids) {
    const auto it = holders.find(item);
    const std::size_t got = it == holders.end() ? 0 : it->second.size();
    if (got != static_cast<std::size_t>(config.coverage)) {
      out.push_back({"coverage",
                     {item},
                     "item covered by " + std::to_string(got) + " raters, expected " +
                         std::to_string(config.coverage)});
    }
  }

  const std::size_t quota = rater_quota(config.item_ids.size(), config.rater_ids.size(),
                                        config.coverage);
  const std::size_t floor = remainder_floor(config.item_ids.size(), config.rater_ids.size(),
                                            config.coverage);
  for (const auto& ra : plan.per_rater) {
    const std::size_t load = ra.items.size();
    if (load > quota || load < floor) {
      out.push_back({"balance",
                     {ra.rater_id},
                     "load " + std::to_string(load) + " outside [" + std::to_string(floor) + ", " +
                         std::to_string(quota) + "]"});
    }
  }
  return out;
}

std::string plan_to_json(const AssignmentPlan& plan) {
  nlohmann::json raters = nlohmann::json::array();
  for (const auto& ra : plan.per_rater) {
    raters.push_back({{"rater_id", ra.rater_id}, {"items", ra.items}});
  }
  nlohmann::json root = {{"coverage", plan.coverage}, {"seed", plan.seed}, {"raters", raters}};
  return root.dump(2) + "\n";
}

AssignmentPlan plan_from_json(std::string_view json_text) {
  try {
    const auto root = nlohmann::json::parse(json_text.begin(), json_text.end());
    AssignmentPlan plan;
    plan.coverage = root.at("coverage").get<int>();
    plan.seed = root.at("seed").get<std::uint64_t>();
    for (const auto& r : root.at("raters")) {
      plan.per_rater.push_back(
          {r.at("rater_id").get<std::string>(), r.at("items").get<std::vector<std::string>>()});
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("assignment plan: ") + e.what());
  }
}

std::string plan_summary(const AssignmentPlan& plan) {
  std::ostringstream os;
  os << "coverage " << plan.coverage << ", seed " << plan.seed << ", "
     << plan.total_slots() << " slots over " << plan.per_rater.size() << " raters\n";
  for (const auto& ra : plan.per_rater) {
    os << "  " << ra.rater_id << ": " << ra.items.size() << " sets\n";
  }
  return os.str();
}

}  // namespace stylevis::study
