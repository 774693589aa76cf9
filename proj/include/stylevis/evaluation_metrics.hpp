#pragma once

#include "stylevis/response_store.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

/// Aggregate and inter-rater metrics over a snapshot of survey responses.
/// Everything here is single-threaded so reports are byte-stable.
namespace stylevis::metrics {

using survey::Favorite;
using survey::SurveyResponse;

/// Two responses to one item from distinct raters, ordered by rater_id.
struct RatingPair {
  std::string item_id;
  SurveyResponse first;
  SurveyResponse second;
};

struct Pairing {
  std::vector<RatingPair> pairs;        // sorted by item_id
  std::vector<std::string> incomplete;  // items without exactly two distinct raters
};

Pairing pair_responses(const std::vector<SurveyResponse>& responses);

enum class SdConvention { Sample, Population };

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Arithmetic mean and standard deviation (n-1 divisor by default; a single
/// value has sd 0). Throws Error(Argument) on an empty list.
MeanSd overall_mean_sd(std::span<const double> values, SdConvention sd = SdConvention::Sample);

struct FavoriteShare {
  Favorite category = Favorite::None;
  std::size_t count = 0;
  double percent = 0.0;
  std::string display;  // half-up, 2 dp
};

/// Categories in the order 1, 2, 3, none; zero counts included.
std::array<FavoriteShare, 4> favorite_distribution(const std::vector<SurveyResponse>& responses);

enum class Field { Rating, Distinctiveness };

int field_value(const SurveyResponse& r, Field field);

/// Mean over pairs of |first - second|. Throws Error(Argument) when empty.
double irr_mean_abs_diff(const std::vector<RatingPair>& pairs, Field field);
/// Fraction of pairs with |first - second| <= 1. Throws on empty.
double irr_within_one(const std::vector<RatingPair>& pairs, Field field);
/// Fraction of pairs whose favorites match (none == none counts). Throws on empty.
double favorite_agreement(const std::vector<RatingPair>& pairs);

struct ItemAggregate {
  std::string item_id;
  double mean_rating = 0.0;
  double mean_distinctiveness = 0.0;
  int abs_diff_rating = 0;
  int abs_diff_distinctiveness = 0;
  bool favorite_agreement = false;
};

ItemAggregate aggregate(const RatingPair& pair);

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
};

/// Bins [1.0,1.5), ..., [4.0,4.5), [4.5,5.0].
std::vector<HistogramBin> mean_rating_histogram(const std::vector<ItemAggregate>& items);

struct IrrSummary {
  double rating_mean_abs_diff = 0.0;
  double rating_within_one = 0.0;  // fraction
  double distinct_mean_abs_diff = 0.0;
  double distinct_within_one = 0.0;
  double favorite_agreement = 0.0;
  // integer tallies the fractions come from
  long rating_abs_diff_sum = 0;
  long rating_within_one_count = 0;
  long distinct_abs_diff_sum = 0;
  long distinct_within_one_count = 0;
  long favorite_agreement_count = 0;
};

struct ScatterPoint {
  std::string item_id;
  double mean_rating = 0.0;
  double mean_distinctiveness = 0.0;
};

struct EvaluationReport {
  MeanSd overall_style_match;
  MeanSd overall_distinctiveness;
  std::array<FavoriteShare, 4> favorite_distribution{};
  IrrSummary irr;
  std::vector<HistogramBin> histogram;
  std::vector<ScatterPoint> scatter;
  std::vector<ItemAggregate> items;
  std::vector<std::string> incomplete_items;
  std::size_t n_items = 0;  // complete (paired) items
  std::size_t n_responses = 0;
  SdConvention sd_convention = SdConvention::Sample;
};

struct ReportOptions {
  SdConvention sd = SdConvention::Sample;
};

/// Composes every metric. Incomplete items are excluded from pair-based
/// metrics but their responses still count toward the favorite distribution.
EvaluationReport build_report(const std::vector<SurveyResponse>& responses,
                              ReportOptions options = {});

std::string report_to_json(const EvaluationReport& report);
std::string histogram_csv(const EvaluationReport& report);
std::string scatter_csv(const EvaluationReport& report);
std::string report_summary(const EvaluationReport& report);

/// Reads the survey export (header must match exactly). Throws Error(Parse)
/// naming the offending line.
std::vector<SurveyResponse> load_responses_csv(std::string_view csv_text);

}  // namespace stylevis::metrics
