#include <doctest.h>

#include "stylevis/error.hpp"
#include "stylevis/study_design.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace stylevis;

namespace {

study::StudyConfig config(std::size_t items, std::size_t raters, int coverage, std::uint64_t seed) {
  study::StudyConfig c;
  for (std::size_t i = 0; i < items; ++i) c.item_ids.push_back(testsupport::item_name(i));
  for (std::size_t r = 0; r < raters; ++r) c.rater_ids.push_back("r" + std::to_string(r + 1));
  c.coverage = coverage;
  c.shuffle_seed = seed;
  return c;
}

std::vector<std::size_t> sorted_loads(const study::AssignmentPlan& plan) {
  std::vector<std::size_t> loads;
  for (const auto& r : plan.per_rater) loads.push_back(r.items.size());
  std::sort(loads.begin(), loads.end());
  return loads;
}

/// Independent check: every item exactly `coverage` distinct raters, no
/// rater repeats an item, every rater present once, loads within
/// [total - (R-1)*ceil(total/R), ceil(total/R)].
bool brute_force_valid(const study::AssignmentPlan& plan, const study::StudyConfig& c) {
  if (plan.per_rater.size() != c.rater_ids.size()) return false;
  std::map<std::string, int> item_hits;
  std::set<std::string> raters;
  for (const auto& r : plan.per_rater) {
    if (!raters.insert(r.rater_id).second) return false;
    if (std::find(c.rater_ids.begin(), c.rater_ids.end(), r.rater_id) == c.rater_ids.end())
      return false;
    std::set<std::string> mine(r.items.begin(), r.items.end());
    if (mine.size() != r.items.size()) return false;
    for (const auto& item : r.items) ++item_hits[item];
  }
  for (const auto& item : c.item_ids)
    if (item_hits[item] != c.coverage) return false;
  if (item_hits.size() != c.item_ids.size()) return false;

  const long total = static_cast<long>(c.item_ids.size()) * c.coverage;
  const long raters_n = static_cast<long>(c.rater_ids.size());
  const long hi = (total + raters_n - 1) / raters_n;
  const long lo = std::max(0L, total - (raters_n - 1) * hi);
  for (const auto& r : plan.per_rater) {
    const long n = static_cast<long>(r.items.size());
    if (n < lo || n > hi) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("49 items, 10 raters, coverage 2: nine raters at 10, one at 8") {
  const auto c = config(49, 10, 2, 42);
  const auto plan = study::make_assignment(c);
  CHECK(plan.total_slots() == 98);
  std::vector<std::size_t> want(9, 10);
  want.insert(want.begin(), 8);
  CHECK(sorted_loads(plan) == want);
  CHECK(study::validate_assignment(plan, c).empty());
  CHECK(brute_force_valid(plan, c));
  CHECK(plan.per_rater.back().items.size() == 8);
}

TEST_CASE("quota and remainder floor") {
  CHECK(study::rater_quota(49, 10, 2) == 10);
  CHECK(study::remainder_floor(49, 10, 2) == 8);
  CHECK(study::rater_quota(6, 4, 2) == 3);
  CHECK(study::remainder_floor(6, 4, 2) == 3);
  CHECK(study::rater_quota(1, 2, 2) == 1);
  CHECK(study::remainder_floor(2, 10, 1) == 0);
}

TEST_CASE("one item, two raters") {
  const auto c = config(1, 2, 2, 1);
  const auto plan = study::make_assignment(c);
  CHECK(sorted_loads(plan) == std::vector<std::size_t>{1, 1});
  CHECK(study::validate_assignment(plan, c).empty());
}

TEST_CASE("six items, four raters balance to three each") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = config(6, 4, 2, seed);
    const auto plan = study::make_assignment(c);
    CHECK(sorted_loads(plan) == std::vector<std::size_t>{3, 3, 3, 3});
    CHECK(brute_force_valid(plan, c));
  }
}

TEST_CASE("fewer slots than raters falls back to round robin") {
  const auto c = config(2, 10, 1, 5);
  const auto plan = study::make_assignment(c);
  CHECK(plan.total_slots() == 2);
  CHECK(sorted_loads(plan).back() == 1);
  CHECK(study::validate_assignment(plan, c).empty());
}

TEST_CASE("infeasible and malformed configs are rejected") {
  auto kind = [](const study::StudyConfig& c) {
    try {
      study::make_assignment(c);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  CHECK(kind(config(5, 2, 3, 0)) == ErrorKind::Infeasible);
  CHECK(kind(config(5, 2, 0, 0)) == ErrorKind::Config);
  auto dup = config(3, 3, 1, 0);
  dup.item_ids[2] = dup.item_ids[0];
  CHECK(kind(dup) == ErrorKind::Config);
}

TEST_CASE("validator names coverage and balance violations") {
  const auto c = config(6, 4, 2, 3);
  auto plan = study::make_assignment(c);

  auto moved = plan;
  moved.per_rater[1].items.push_back(moved.per_rater[0].items.back());
  moved.per_rater[0].items.pop_back();
  // still 2 raters per item unless the recipient already had it
  auto rules = [](const std::vector<study::Violation>& vs) {
    std::set<std::string> out;
    for (const auto& v : vs) out.insert(v.rule);
    return out;
  };
  CHECK(rules(study::validate_assignment(moved, c)).count("balance") == 1);

  auto dropped = plan;
  const auto lost = dropped.per_rater[2].items.front();
  dropped.per_rater[2].items.erase(dropped.per_rater[2].items.begin());
  const auto vs = study::validate_assignment(dropped, c);
  CHECK(rules(vs).count("coverage") == 1);
  bool names_item = false;
  for (const auto& v : vs)
    if (v.rule == "coverage" && std::find(v.ids.begin(), v.ids.end(), lost) != v.ids.end())
      names_item = true;
  CHECK(names_item);

  auto doubled = plan;
  doubled.per_rater[0].items.push_back(doubled.per_rater[0].items.front());
  CHECK(rules(study::validate_assignment(doubled, c)).count("duplicate") == 1);

  auto stranger = plan;
  stranger.per_rater[0].rater_id = "ghost";
  const auto sr = rules(study::validate_assignment(stranger, c));
  CHECK(sr.count("unknown_rater") == 1);
  CHECK(sr.count("missing_rater") == 1);

  auto bogus = plan;
  bogus.per_rater[0].items[0] = "nope";
  CHECK(rules(study::validate_assignment(bogus, c)).count("unknown_item") == 1);
}

TEST_CASE("validator agrees with the brute-force check on random configs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t raters = 1 + rng() % 12;
    const std::size_t items = 1 + rng() % 60;
    const int coverage = 1 + static_cast<int>(rng() % std::min<std::size_t>(raters, 4));
    const auto c = config(items, raters, coverage, rng());
    const auto plan = study::make_assignment(c);
    INFO("items=" << items << " raters=" << raters << " coverage=" << coverage);
    CHECK(plan.total_slots() == items * static_cast<std::size_t>(coverage));
    CHECK(study::validate_assignment(plan, c).empty());
    CHECK(brute_force_valid(plan, c));
  }
}

TEST_CASE("same seed, same plan; different seed shuffles") {
  const auto a = study::make_assignment(config(49, 10, 2, 9));
  const auto b = study::make_assignment(config(49, 10, 2, 9));
  const auto other = study::make_assignment(config(49, 10, 2, 10));
  CHECK(a == b);
  CHECK_FALSE(a == other);
}

TEST_CASE("plan json round-trip and summary") {
  const auto plan = study::make_assignment(config(49, 10, 2, 77));
  CHECK(study::plan_from_json(study::plan_to_json(plan)) == plan);
  const auto summary = study::plan_summary(plan);
  CHECK(summary.find(plan.per_rater.front().rater_id) != std::string::npos);
  CHECK(plan.find("r3") != nullptr);
  CHECK(plan.find("r99") == nullptr);
}

TEST_CASE("bounded draws stay in range and cover it") {
  study::SeededRng rng(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}
