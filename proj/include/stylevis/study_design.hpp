#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace stylevis::study {

struct StudyConfig {
  std::vector<std::string> item_ids;
  std::vector<std::string> rater_ids;
  int coverage = 2;
  std::uint64_t shuffle_seed = 0;

  /// Throws Error(Config) on duplicate ids or coverage < 1, and
  /// Error(Infeasible) when coverage exceeds the number of raters.
  void validate() const;
};

struct RaterAssignment {
  std::string rater_id;
  std::vector<std::string> items;  // presentation order

  bool operator==(const RaterAssignment&) const = default;
};

struct AssignmentPlan {
  /// Raters in seed-shuffled dealing order; the last one absorbs any remainder.
  std::vector<RaterAssignment> per_rater;
  int coverage = 0;
  std::uint64_t seed = 0;

  const RaterAssignment* find(std::string_view rater_id) const;
  std::size_t total_slots() const;

  bool operator==(const AssignmentPlan&) const = default;
};

/// Per-rater quota: ceil(coverage * items / raters).
std::size_t rater_quota(std::size_t items, std::size_t raters, int coverage);

/// Lightest load the balance rule allows: the remainder left for one rater
/// after all others take a full quota, floored at zero.
std::size_t remainder_floor(std::size_t items, std::size_t raters, int coverage);

/// Every item goes to `coverage` distinct raters. Raters in shuffled order
/// are filled to the quota, so at most one rater ends up lighter (49 items,
/// 10 raters, coverage 2 gives nine raters 10 sets and one rater 8). When
/// even that shape is impossible (fewer slots than raters need) slots are
/// dealt round-robin instead. Item order per rater is shuffled as well.
AssignmentPlan make_assignment(const StudyConfig& config);

struct Violation {
  std::string rule;  // coverage | duplicate | balance | unknown_item | unknown_rater | missing_rater
  std::vector<std::string> ids;
  std::string message;
};

/// Empty iff the plan satisfies every rule for `config`.
std::vector<Violation> validate_assignment(const AssignmentPlan& plan, const StudyConfig& config);

std::string plan_to_json(const AssignmentPlan& plan);
AssignmentPlan plan_from_json(std::string_view json_text);

/// Human-readable load table.
std::string plan_summary(const AssignmentPlan& plan);

/// mt19937_64 with a platform-independent bounded draw (the standard
/// distributions are implementation-defined).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stylevis::study
