#pragma once

#include "stylevis/evaluation_metrics.hpp"
#include "stylevis/response_store.hpp"
#include "stylevis/study_design.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

namespace fs = std::filesystem;
using stylevis::survey::Favorite;
using stylevis::survey::ResponseDraft;
using stylevis::survey::SurveyResponse;

inline fs::path fixture(const std::string& rel) { return fs::path(STYLEVIS_FIXTURES) / rel; }

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "stylevis-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline ResponseDraft make_draft(std::string rater, std::string item, int rating,
                                Favorite favorite, int distinct) {
  ResponseDraft d;
  d.rater_id = std::move(rater);
  d.item_id = std::move(item);
  d.rating = rating;
  d.q2 = {{{"palette", "muted colors echo the tone"}, {"subject", "the harbor recurs"}}};
  d.favorite = favorite;
  d.favorite_justification = "closest mood";
  d.distinctiveness = distinct;
  return d;
}

inline std::string item_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "item%03zu", i);
  return buf;
}

/// A study where every item has exactly two responses from distinct raters.
inline std::vector<SurveyResponse> random_complete_study(std::mt19937_64& rng, std::size_t items) {
  std::uniform_int_distribution<int> likert(1, 5);
  std::uniform_int_distribution<int> fav(0, 3);
  std::uniform_int_distribution<int> rater(0, 9);
  std::vector<SurveyResponse> out;
  std::uint64_t id = 1;
  for (std::size_t i = 0; i < items; ++i) {
    const int a = rater(rng);
    int b = rater(rng);
    while (b == a) b = rater(rng);
    for (int r : {a, b}) {
      SurveyResponse s;
      s.id = id++;
      s.answers = make_draft("r" + std::to_string(r), item_name(i), likert(rng),
                             static_cast<Favorite>(fav(rng)), likert(rng));
      s.submitted_at = "2025-03-01T10:00:00.000Z";
      out.push_back(std::move(s));
    }
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

/// Brute-force reference for the evaluation report: nested loops, no maps,
/// and SD from pairwise squared differences.
struct ReferenceReport {
  std::size_t n_items = 0;
  std::vector<std::string> items;  // sorted
  std::vector<double> mean_rating;
  std::vector<double> mean_distinct;
  double style_mean = 0, style_sd = 0, distinct_mean = 0, distinct_sd = 0;
  double fav_percent[4] = {0, 0, 0, 0};  // 1, 2, 3, none
  std::size_t fav_count[4] = {0, 0, 0, 0};
  double rating_mad = 0, rating_within = 0, distinct_mad = 0, distinct_within = 0,
         fav_agree = 0;
  std::size_t histogram[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::vector<std::string> incomplete;
};

inline double reference_sd(const std::vector<double>& xs, bool sample) {
  const double n = static_cast<double>(xs.size());
  if (xs.size() < 2) return 0.0;
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) pair_sum += (xs[i] - xs[j]) * (xs[i] - xs[j]);
  return std::sqrt(pair_sum / (sample ? n * (n - 1.0) : n * n));
}

inline ReferenceReport reference_report(const std::vector<SurveyResponse>& rs, bool sample = true) {
  ReferenceReport ref;
  for (const auto& r : rs) {
    int slot = r.answers.favorite == Favorite::None ? 3 : static_cast<int>(r.answers.favorite) - 1;
    ++ref.fav_count[slot];
  }
  for (int k = 0; k < 4; ++k)
    ref.fav_percent[k] = rs.empty() ? 0.0 : ref.fav_count[k] * 100.0 / static_cast<double>(rs.size());

  std::vector<std::string> ids;
  for (const auto& r : rs)
    if (std::find(ids.begin(), ids.end(), r.item_id()) == ids.end()) ids.push_back(r.item_id());
  std::sort(ids.begin(), ids.end());

  double rd = 0, dd = 0, rw = 0, dw = 0, fa = 0;
  for (const auto& id : ids) {
    std::vector<const SurveyResponse*> group;
    for (const auto& r : rs)
      if (r.item_id() == id) group.push_back(&r);
    if (group.size() != 2 || group[0]->rater_id() == group[1]->rater_id()) {
      ref.incomplete.push_back(id);
      continue;
    }
    const auto& a = group[0]->answers;
    const auto& b = group[1]->answers;
    ref.items.push_back(id);
    const double mr = (a.rating + b.rating) / 2.0;
    ref.mean_rating.push_back(mr);
    ref.mean_distinct.push_back((a.distinctiveness + b.distinctiveness) / 2.0);
    const int dr = a.rating > b.rating ? a.rating - b.rating : b.rating - a.rating;
    const int ddv = a.distinctiveness > b.distinctiveness ? a.distinctiveness - b.distinctiveness
                                                          : b.distinctiveness - a.distinctiveness;
    rd += dr;
    dd += ddv;
    rw += dr <= 1 ? 1 : 0;
    dw += ddv <= 1 ? 1 : 0;
    fa += a.favorite == b.favorite ? 1 : 0;
    for (int k = 0; k < 8; ++k) {
      const double lo = 1.0 + 0.5 * k;
      if ((mr >= lo && mr < lo + 0.5) || (k == 7 && mr >= lo)) ++ref.histogram[k];
    }
  }
  ref.n_items = ref.items.size();
  if (ref.n_items) {
    const double n = static_cast<double>(ref.n_items);
    double s = 0, t = 0;
    for (std::size_t i = 0; i < ref.n_items; ++i) {
      s += ref.mean_rating[i];
      t += ref.mean_distinct[i];
    }
    ref.style_mean = s / n;
    ref.distinct_mean = t / n;
    ref.style_sd = reference_sd(ref.mean_rating, sample);
    ref.distinct_sd = reference_sd(ref.mean_distinct, sample);
    ref.rating_mad = rd / n;
    ref.distinct_mad = dd / n;
    ref.rating_within = rw / n;
    ref.distinct_within = dw / n;
    ref.fav_agree = fa / n;
  }
  return ref;
}

/// Field names whose values differ by more than `tol`.
inline std::vector<std::string> compare_report(const stylevis::metrics::EvaluationReport& got,
                                               const ReferenceReport& want, double tol) {
  std::vector<std::string> bad;
  auto check = [&](const std::string& name, double a, double b) {
    if (!(std::fabs(a - b) <= tol)) bad.push_back(name);
  };
  if (got.n_items != want.n_items) bad.push_back("n_items");
  if (got.incomplete_items != want.incomplete) bad.push_back("incomplete_items");
  check("style_mean", got.overall_style_match.mean, want.style_mean);
  check("style_sd", got.overall_style_match.sd, want.style_sd);
  check("distinct_mean", got.overall_distinctiveness.mean, want.distinct_mean);
  check("distinct_sd", got.overall_distinctiveness.sd, want.distinct_sd);
  for (int k = 0; k < 4; ++k) {
    if (got.favorite_distribution[k].count != want.fav_count[k]) bad.push_back("fav_count");
    check("fav_percent", got.favorite_distribution[k].percent, want.fav_percent[k]);
  }
  check("rating_mad", got.irr.rating_mean_abs_diff, want.rating_mad);
  check("rating_within", got.irr.rating_within_one, want.rating_within);
  check("distinct_mad", got.irr.distinct_mean_abs_diff, want.distinct_mad);
  check("distinct_within", got.irr.distinct_within_one, want.distinct_within);
  check("fav_agree", got.irr.favorite_agreement, want.fav_agree);
  if (got.histogram.size() != 8) {
    bad.push_back("histogram_size");
  } else {
    for (int k = 0; k < 8; ++k)
      if (got.histogram[k].count != want.histogram[k]) bad.push_back("histogram");
  }
  if (got.items.size() != want.items.size() || got.scatter.size() != want.items.size()) {
    bad.push_back("items_size");
  } else {
    for (std::size_t i = 0; i < want.items.size(); ++i) {
      if (got.items[i].item_id != want.items[i] || got.scatter[i].item_id != want.items[i])
        bad.push_back("item_order");
      check("item_mean_rating", got.items[i].mean_rating, want.mean_rating[i]);
      check("item_mean_distinct", got.items[i].mean_distinctiveness, want.mean_distinct[i]);
      check("scatter_rating", got.scatter[i].mean_rating, want.mean_rating[i]);
      check("scatter_distinct", got.scatter[i].mean_distinctiveness, want.mean_distinct[i]);
    }
  }
  return bad;
}

/// Responses reproducing given favorite counts (1, 2, 3, none), one item each.
inline std::vector<SurveyResponse> responses_with_favorites(const std::size_t (&counts)[4]) {
  std::vector<SurveyResponse> out;
  const Favorite order[4] = {Favorite::Image1, Favorite::Image2, Favorite::Image3, Favorite::None};
  std::uint64_t id = 1;
  for (int k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i < counts[k]; ++i) {
      SurveyResponse s;
      s.id = id;
      s.answers = make_draft("r01", item_name(id), 3, order[k], 3);
      s.submitted_at = "2025-03-01T10:00:00.000Z";
      out.push_back(std::move(s));
      ++id;
    }
  }
  return out;
}

/// Builds `n` rating pairs on one field whose |diff| values sum to `diff_sum`
/// with exactly `within` pairs at |diff| <= 1. Returns empty when the
/// combination is impossible with Likert 1..5 answers.
inline std::vector<std::pair<int, int>> pairs_with_diffs(int n, int diff_sum, int within) {
  // within-one pairs use diffs in {0,1}; the rest use {2,3,4}.
  const int wide = n - within;
  for (int ones = 0; ones <= within; ++ones) {
    const int rest = diff_sum - ones;
    if (rest < 2 * wide || rest > 4 * wide) continue;
    std::vector<int> diffs(static_cast<std::size_t>(within), 0);
    for (int i = 0; i < ones; ++i) diffs[static_cast<std::size_t>(i)] = 1;
    int extra = rest - 2 * wide;
    for (int i = 0; i < wide; ++i) {
      const int add = std::min(extra, 2);
      diffs.push_back(2 + add);
      extra -= add;
    }
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
      if (i % 2) out.emplace_back(1, 1 + diffs[i]);
      else out.emplace_back(1 + diffs[i], 1);
    }
    return out;
  }
  return {};
}

/// Two responses per item from raters "rA"/"rB". Field values come from the
/// given pairs; the first `agree` items share a favorite, the rest differ.
inline std::vector<SurveyResponse> study_from_pairs(const std::vector<std::pair<int, int>>& rating,
                                                    const std::vector<std::pair<int, int>>& distinct,
                                                    std::size_t agree) {
  std::vector<SurveyResponse> out;
  std::uint64_t id = 1;
  for (std::size_t i = 0; i < rating.size(); ++i) {
    const Favorite fa = static_cast<Favorite>(i % 4);
    const Favorite fb = i < agree ? fa : static_cast<Favorite>((i + 1) % 4);
    const std::pair<Favorite, Favorite> fav{fa, fb};
    for (int side = 0; side < 2; ++side) {
      SurveyResponse s;
      s.id = id++;
      s.answers = make_draft(side ? "rB" : "rA", item_name(i),
                             side ? rating[i].second : rating[i].first,
                             side ? fav.second : fav.first,
                             side ? distinct[i].second : distinct[i].first);
      s.submitted_at = "2025-03-01T10:00:00.000Z";
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace testsupport
