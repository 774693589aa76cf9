#include "stylevis/evaluation_metrics.hpp"

#include "stylevis/csv.hpp"
#include "stylevis/error.hpp"
#include "stylevis/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace stylevis::metrics {
namespace {

constexpr double kHistLow = 1.0;
constexpr double kHistWidth = 0.5;
constexpr int kHistBins = 8;

void require_pairs(const std::vector<RatingPair>& pairs, const char* what) {
  if (pairs.empty()) throw Error(ErrorKind::Argument, std::string(what) + ": no rating pairs");
}

std::string pct_display(long count, std::size_t total) {
  if (total == 0) return "0.00";
  return text::rational_half_up(100 * count, static_cast<std::int64_t>(total), 2);
}

std::string mad_display(long sum, std::size_t n) {
  if (n == 0) return "0.000";
  return text::rational_half_up(sum, static_cast<std::int64_t>(n), 3);
}

int parse_int(const std::string& s, const char* field, std::size_t line) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0) {
    throw Error(ErrorKind::Parse, "csv line " + std::to_string(line) + ": " + field +
                                      " is not an integer: '" + s + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

Pairing pair_responses(const std::vector<SurveyResponse>& responses) {
  std::map<std::string, std::vector<const SurveyResponse*>> by_item;
  for (const auto& r : responses) by_item[r.item_id()].push_back(&r);

  Pairing out;
  for (auto& [item, group] : by_item) {
    if (group.size() != 2 || group[0]->rater_id() == group[1]->rater_id()) {
      out.incomplete.push_back(item);
      continue;
    }
    const bool swap = group[1]->rater_id() < group[0]->rater_id();
    out.pairs.push_back({item, swap ? *group[1] : *group[0], swap ? *group[0] : *group[1]});
  }
  return out;
}

MeanSd overall_mean_sd(std::span<const double> values, SdConvention sd) {
  if (values.empty()) throw Error(ErrorKind::Argument, "overall_mean_sd: empty list");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double spread = 0.0;
  if (sd == SdConvention::Population) spread = std::sqrt(ss / n);
  else if (values.size() > 1) spread = std::sqrt(ss / (n - 1.0));
  return {mean, spread};
}

std::array<FavoriteShare, 4> favorite_distribution(const std::vector<SurveyResponse>& responses) {
  std::array<FavoriteShare, 4> out{};
  const std::array<Favorite, 4> order = {Favorite::Image1, Favorite::Image2, Favorite::Image3,
                                         Favorite::None};
  for (std::size_t i = 0; i < order.size(); ++i) out[i].category = order[i];
  for (const auto& r : responses) {
    for (auto& share : out) {
      if (share.category == r.answers.favorite) ++share.count;
    }
  }
  const std::size_t total = responses.size();
  for (auto& share : out) {
    share.percent = total ? 100.0 * static_cast<double>(share.count) / static_cast<double>(total)
                          : 0.0;
    share.display = pct_display(static_cast<long>(share.count), total);
  }
  return out;
}

int field_value(const SurveyResponse& r, Field field) {
  return field == Field::Rating ? r.answers.rating : r.answers.distinctiveness;
}

double irr_mean_abs_diff(const std::vector<RatingPair>& pairs, Field field) {
  require_pairs(pairs, "irr_mean_abs_diff");
  long sum = 0;
  for (const auto& p : pairs) sum += std::abs(field_value(p.first, field) - field_value(p.second, field));
  return static_cast<double>(sum) / static_cast<double>(pairs.size());
}

double irr_within_one(const std::vector<RatingPair>& pairs, Field field) {
  require_pairs(pairs, "irr_within_one");
  long within = 0;
  for (const auto& p : pairs) {
    if (std::abs(field_value(p.first, field) - field_value(p.second, field)) <= 1) ++within;
  }
  return static_cast<double>(within) / static_cast<double>(pairs.size());
}

double favorite_agreement(const std::vector<RatingPair>& pairs) {
  require_pairs(pairs, "favorite_agreement");
  long agree = 0;
  for (const auto& p : pairs) {
    if (p.first.answers.favorite == p.second.answers.favorite) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(pairs.size());
}

ItemAggregate aggregate(const RatingPair& pair) {
  const auto& a = pair.first.answers;
  const auto& b = pair.second.answers;
  ItemAggregate agg;
  agg.item_id = pair.item_id;
  agg.mean_rating = (a.rating + b.rating) / 2.0;
  agg.mean_distinctiveness = (a.distinctiveness + b.distinctiveness) / 2.0;
  agg.abs_diff_rating = std::abs(a.rating - b.rating);
  agg.abs_diff_distinctiveness = std::abs(a.distinctiveness - b.distinctiveness);
  agg.favorite_agreement = a.favorite == b.favorite;
  return agg;
}

std::vector<HistogramBin> mean_rating_histogram(const std::vector<ItemAggregate>& items) {
  std::vector<HistogramBin> bins(kHistBins);
  for (int i = 0; i < kHistBins; ++i) {
    bins[static_cast<std::size_t>(i)].lower = kHistLow + kHistWidth * i;
    bins[static_cast<std::size_t>(i)].upper = kHistLow + kHistWidth * (i + 1);
  }
  for (const auto& item : items) {
    int idx = static_cast<int>(std::floor((item.mean_rating - kHistLow) / kHistWidth));
    idx = std::clamp(idx, 0, kHistBins - 1);
    ++bins[static_cast<std::size_t>(idx)].count;
  }
  return bins;
}

EvaluationReport build_report(const std::vector<SurveyResponse>& responses,
                              ReportOptions options) {
  EvaluationReport report;
  report.sd_convention = options.sd;
  report.n_responses = responses.size();
  report.favorite_distribution = favorite_distribution(responses);

  auto pairing = pair_responses(responses);
  report.incomplete_items = std::move(pairing.incomplete);
  report.n_items = pairing.pairs.size();

  std::vector<double> ratings;
  std::vector<double> distinct;
  auto& irr = report.irr;
  for (const auto& pair : pairing.pairs) {
    auto agg = aggregate(pair);
    ratings.push_back(agg.mean_rating);
    distinct.push_back(agg.mean_distinctiveness);
    irr.rating_abs_diff_sum += agg.abs_diff_rating;
    irr.distinct_abs_diff_sum += agg.abs_diff_distinctiveness;
    if (agg.abs_diff_rating <= 1) ++irr.rating_within_one_count;
    if (agg.abs_diff_distinctiveness <= 1) ++irr.distinct_within_one_count;
    if (agg.favorite_agreement) ++irr.favorite_agreement_count;
    report.scatter.push_back({agg.item_id, agg.mean_rating, agg.mean_distinctiveness});
    report.items.push_back(std::move(agg));
  }

  if (!pairing.pairs.empty()) {
    report.overall_style_match = overall_mean_sd(ratings, options.sd);
    report.overall_distinctiveness = overall_mean_sd(distinct, options.sd);
    irr.rating_mean_abs_diff = irr_mean_abs_diff(pairing.pairs, Field::Rating);
    irr.rating_within_one = irr_within_one(pairing.pairs, Field::Rating);
    irr.distinct_mean_abs_diff = irr_mean_abs_diff(pairing.pairs, Field::Distinctiveness);
    irr.distinct_within_one = irr_within_one(pairing.pairs, Field::Distinctiveness);
    irr.favorite_agreement = favorite_agreement(pairing.pairs);
  }
  report.histogram = mean_rating_histogram(report.items);
  return report;
}

std::string report_to_json(const EvaluationReport& r) {
  using nlohmann::json;
  const auto n = r.n_items;
  const auto& irr = r.irr;

  json favorites = json::array();
  for (const auto& f : r.favorite_distribution) {
    favorites.push_back({{"category", std::string(survey::to_string(f.category))},
                         {"count", f.count},
                         {"percent", f.percent},
                         {"display", f.display}});
  }
  json hist = json::array();
  for (const auto& b : r.histogram) {
    hist.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
  }
  json scatter = json::array();
  for (const auto& p : r.scatter) {
    scatter.push_back({{"item_id", p.item_id},
                       {"mean_rating", p.mean_rating},
                       {"mean_distinctiveness", p.mean_distinctiveness}});
  }
  json items = json::array();
  for (const auto& a : r.items) {
    items.push_back({{"item_id", a.item_id},
                     {"mean_rating", a.mean_rating},
                     {"mean_distinctiveness", a.mean_distinctiveness},
                     {"abs_diff_rating", a.abs_diff_rating},
                     {"abs_diff_distinctiveness", a.abs_diff_distinctiveness},
                     {"favorite_agreement", a.favorite_agreement}});
  }

  json root = {
      {"n_items", r.n_items},
      {"n_responses", r.n_responses},
      {"incomplete_items", r.incomplete_items},
      {"sd_convention", r.sd_convention == SdConvention::Sample ? "sample" : "population"},
      {"overall_style_match",
       {{"mean", r.overall_style_match.mean},
        {"sd", r.overall_style_match.sd},
        {"display",
         {{"mean", text::double_half_up(r.overall_style_match.mean, 2)},
          {"sd", text::double_half_up(r.overall_style_match.sd, 2)}}}}},
      {"overall_distinctiveness",
       {{"mean", r.overall_distinctiveness.mean},
        {"sd", r.overall_distinctiveness.sd},
        {"display",
         {{"mean", text::double_half_up(r.overall_distinctiveness.mean, 2)},
          {"sd", text::double_half_up(r.overall_distinctiveness.sd, 2)}}}}},
      {"favorite_distribution", favorites},
      {"irr",
       {{"rating_mean_abs_diff", irr.rating_mean_abs_diff},
        {"rating_within_one_pct", 100.0 * irr.rating_within_one},
        {"distinct_mean_abs_diff", irr.distinct_mean_abs_diff},
        {"distinct_within_one_pct", 100.0 * irr.distinct_within_one},
        {"favorite_agreement_pct", 100.0 * irr.favorite_agreement},
        {"display",
         {{"rating_mean_abs_diff", mad_display(irr.rating_abs_diff_sum, n)},
          {"rating_within_one_pct", pct_display(irr.rating_within_one_count, n)},
          {"distinct_mean_abs_diff", mad_display(irr.distinct_abs_diff_sum, n)},
          {"distinct_within_one_pct", pct_display(irr.distinct_within_one_count, n)},
          {"favorite_agreement_pct", pct_display(irr.favorite_agreement_count, n)}}}}},
      {"histogram", hist},
      {"scatter", scatter},
      {"items", items},
  };
  return root.dump(2) + "\n";
}

std::string histogram_csv(const EvaluationReport& report) {
  std::string out = "bin_lower,bin_upper,count\n";
  for (const auto& b : report.histogram) {
    out += text::double_half_up(b.lower, 1) + "," + text::double_half_up(b.upper, 1) + "," +
           std::to_string(b.count) + "\n";
  }
  return out;
}

std::string scatter_csv(const EvaluationReport& report) {
  std::string out = "item_id,mean_rating,mean_distinctiveness\n";
  for (const auto& p : report.scatter) {
    out += csv::format_row({p.item_id, text::double_half_up(p.mean_rating, 1),
                            text::double_half_up(p.mean_distinctiveness, 1)});
  }
  return out;
}

std::string report_summary(const EvaluationReport& r) {
  const auto n = r.n_items;
  const auto& irr = r.irr;
  std::ostringstream os;
  os << "responses: " << r.n_responses << ", paired items: " << r.n_items
     << ", incomplete items: " << r.incomplete_items.size() << "\n";
  os << "style match (Q1):      mean " << text::double_half_up(r.overall_style_match.mean, 2)
     << " (SD " << text::double_half_up(r.overall_style_match.sd, 2) << ")\n";
  os << "distinctiveness (Q4):  mean " << text::double_half_up(r.overall_distinctiveness.mean, 2)
     << " (SD " << text::double_half_up(r.overall_distinctiveness.sd, 2) << ")\n";
  os << "favorite image (Q3):";
  for (const auto& f : r.favorite_distribution) {
    os << "  " << survey::to_string(f.category) << "=" << f.display << "% (" << f.count << ")";
  }
  os << "\n";
  os << "IRR Q1: mean |diff| " << mad_display(irr.rating_abs_diff_sum, n) << ", within +/-1 "
     << pct_display(irr.rating_within_one_count, n) << "%\n";
  os << "IRR Q4: mean |diff| " << mad_display(irr.distinct_abs_diff_sum, n) << ", within +/-1 "
     << pct_display(irr.distinct_within_one_count, n) << "%\n";
  os << "IRR Q3: favorite agreement " << pct_display(irr.favorite_agreement_count, n) << "%\n";
  return os.str();
}

std::vector<SurveyResponse> load_responses_csv(std::string_view csv_text) {
  const auto rows = csv::parse(csv_text);
  if (rows.empty()) throw Error(ErrorKind::Parse, "csv: missing header");
  if (text::join(rows[0], ",") != survey::kCsvHeader) {
    throw Error(ErrorKind::Parse, "csv: unexpected header '" + text::join(rows[0], ",") + "'");
  }
  std::vector<SurveyResponse> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto line = i + 1;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 12) {
      throw Error(ErrorKind::Parse, "csv record " + std::to_string(line) + ": expected 12 fields, got " +
                                        std::to_string(row.size()));
    }
    SurveyResponse r;
    r.id = static_cast<std::uint64_t>(parse_int(row[0], "id", line));
    auto& a = r.answers;
    a.rater_id = row[1];
    a.item_id = row[2];
    a.rating = parse_int(row[3], "rating", line);
    const auto fav = survey::favorite_from_string(row[4]);
    if (!fav) {
      throw Error(ErrorKind::Parse, "csv record " + std::to_string(line) +
                                        ": bad favorite-image-id '" + row[4] + "'");
    }
    a.favorite = *fav;
    a.distinctiveness = parse_int(row[5], "distinctiveness", line);
    a.q2[0] = {row[6], row[7]};
    a.q2[1] = {row[8], row[9]};
    a.favorite_justification = row[10];
    r.submitted_at = row[11];
    try {
      survey::validate_draft(a);
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, "csv record " + std::to_string(line) + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace stylevis::metrics
