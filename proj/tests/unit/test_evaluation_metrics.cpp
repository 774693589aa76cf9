#include <doctest.h>

#include "stylevis/error.hpp"
#include "stylevis/evaluation_metrics.hpp"
#include "stylevis/text.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <random>

using namespace stylevis;
using metrics::Field;
using survey::Favorite;
using testsupport::pairs_with_diffs;
using testsupport::study_from_pairs;

TEST_CASE("mean and sample sd of two values") {
  const std::vector<double> v = {4.5, 3.5};
  const auto m = metrics::overall_mean_sd(v);
  CHECK(m.mean == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(m.sd == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(text::double_half_up(m.sd, 4) == "0.7071");
  const auto pop = metrics::overall_mean_sd(v, metrics::SdConvention::Population);
  CHECK(pop.sd == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("a single value has zero spread; an empty list is an error") {
  const std::vector<double> one = {3.0};
  CHECK(metrics::overall_mean_sd(one).sd == 0.0);
  CHECK_THROWS_AS(metrics::overall_mean_sd(std::vector<double>{}), Error);
  CHECK_THROWS_AS(metrics::irr_mean_abs_diff({}, Field::Rating), Error);
  CHECK_THROWS_AS(metrics::irr_within_one({}, Field::Rating), Error);
  CHECK_THROWS_AS(metrics::favorite_agreement({}), Error);
}

TEST_CASE("favorite distribution of 33/27/38/0 over 98") {
  const std::size_t counts[4] = {33, 27, 38, 0};
  const auto dist = metrics::favorite_distribution(testsupport::responses_with_favorites(counts));
  CHECK(dist[0].display == "33.67");
  CHECK(dist[1].display == "27.55");
  CHECK(dist[2].display == "38.78");
  CHECK(dist[3].display == "0.00");
  CHECK(dist[3].category == Favorite::None);
  CHECK(dist[2].count == 38);
  CHECK(dist[2].percent == doctest::Approx(3800.0 / 98.0).epsilon(1e-12));
}

TEST_CASE("favorite distribution counts 'none' and sums to 100") {
  const std::size_t counts[4] = {5, 0, 3, 2};
  const auto dist = metrics::favorite_distribution(testsupport::responses_with_favorites(counts));
  CHECK(dist[3].count == 2);
  CHECK(dist[3].display == "20.00");
  double total = 0;
  for (const auto& d : dist) total += d.percent;
  CHECK(total == doctest::Approx(100.0));
  const auto empty = metrics::favorite_distribution({});
  for (const auto& d : empty) CHECK(d.display == "0.00");
}

TEST_CASE("agreement tallies render at display precision") {
  const auto rating = pairs_with_diffs(49, 36, 44);
  const auto distinct = pairs_with_diffs(49, 59, 31);
  REQUIRE(rating.size() == 49);
  REQUIRE(distinct.size() == 49);
  const auto responses = study_from_pairs(rating, distinct, 20);
  const auto report = metrics::build_report(responses);
  CHECK(report.n_items == 49);
  CHECK(report.irr.rating_abs_diff_sum == 36);
  CHECK(report.irr.rating_within_one_count == 44);
  CHECK(report.irr.distinct_abs_diff_sum == 59);
  CHECK(report.irr.distinct_within_one_count == 31);
  CHECK(report.irr.favorite_agreement_count == 20);

  const auto j = nlohmann::json::parse(metrics::report_to_json(report));
  const auto& d = j["irr"]["display"];
  CHECK(d["rating_mean_abs_diff"] == "0.735");
  CHECK(d["rating_within_one_pct"] == "89.80");
  CHECK(d["distinct_mean_abs_diff"] == "1.204");
  CHECK(d["distinct_within_one_pct"] == "63.27");
  CHECK(d["favorite_agreement_pct"] == "40.82");
  CHECK(report.irr.rating_mean_abs_diff == doctest::Approx(36.0 / 49.0).epsilon(1e-12));
}

TEST_CASE("97 responses give 48 pairs and one incomplete item") {
  std::mt19937_64 rng(8);
  auto responses = testsupport::random_complete_study(rng, 49);
  const auto target = responses.front().item_id();
  responses.erase(responses.begin());
  REQUIRE(responses.size() == 97);
  const auto pairing = metrics::pair_responses(responses);
  CHECK(pairing.pairs.size() == 48);
  CHECK(pairing.incomplete == std::vector<std::string>{target});

  const auto report = metrics::build_report(responses);
  CHECK(report.n_items == 48);
  CHECK(report.n_responses == 97);
  std::size_t fav_total = 0;
  for (const auto& f : report.favorite_distribution) fav_total += f.count;
  CHECK(fav_total == 97);
  for (const auto& item : report.items) CHECK(item.item_id != target);
}

TEST_CASE("pair order does not change any statistic") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto responses = testsupport::random_complete_study(rng, 30);
    auto swapped = responses;
    for (auto& r : swapped) r.answers.rater_id = r.rater_id() == "r0" ? "r9x" : "a" + r.rater_id();
    const auto a = metrics::build_report(responses);
    const auto b = metrics::build_report(swapped);
    CHECK(a.irr.rating_mean_abs_diff == b.irr.rating_mean_abs_diff);
    CHECK(a.irr.distinct_within_one == b.irr.distinct_within_one);
    CHECK(a.irr.favorite_agreement == b.irr.favorite_agreement);
    CHECK(a.overall_style_match.mean == b.overall_style_match.mean);
  }
}

TEST_CASE("pairs are ordered by item and rater") {
  std::mt19937_64 rng(1);
  const auto pairing = metrics::pair_responses(testsupport::random_complete_study(rng, 12));
  for (std::size_t i = 1; i < pairing.pairs.size(); ++i)
    CHECK(pairing.pairs[i - 1].item_id < pairing.pairs[i].item_id);
  for (const auto& p : pairing.pairs) CHECK(p.first.rater_id() < p.second.rater_id());
}

TEST_CASE("report agrees with the brute-force reference") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    auto responses = testsupport::random_complete_study(rng, 5 + rng() % 46);
    if (trial % 5 == 0) responses.pop_back();
    for (bool sample : {true, false}) {
      const auto report = metrics::build_report(
          responses, {sample ? metrics::SdConvention::Sample : metrics::SdConvention::Population});
      const auto diffs =
          testsupport::compare_report(report, testsupport::reference_report(responses, sample), 1e-9);
      INFO("trial " << trial);
      CHECK(diffs.empty());
    }
  }
}

TEST_CASE("histogram bins cover 1..5 with the top edge inclusive") {
  std::vector<metrics::ItemAggregate> items(4);
  items[0].mean_rating = 1.0;
  items[1].mean_rating = 1.5;
  items[2].mean_rating = 4.5;
  items[3].mean_rating = 5.0;
  const auto bins = metrics::mean_rating_histogram(items);
  REQUIRE(bins.size() == 8);
  CHECK(bins[0].count == 1);
  CHECK(bins[1].count == 1);
  CHECK(bins[7].count == 2);
  CHECK(bins[7].upper == 5.0);
}

TEST_CASE("empty responses make an empty but well-formed report") {
  const auto report = metrics::build_report({});
  CHECK(report.n_items == 0);
  const auto j = nlohmann::json::parse(metrics::report_to_json(report));
  CHECK(j["n_responses"] == 0);
  CHECK(metrics::histogram_csv(report).rfind("bin_lower,bin_upper,count\n", 0) == 0);
  CHECK(metrics::scatter_csv(report) == "item_id,mean_rating,mean_distinctiveness\n");
  CHECK_FALSE(metrics::report_summary(report).empty());
}

TEST_CASE("csv import rejects a wrong header or a bad field") {
  CHECK_THROWS_AS(metrics::load_responses_csv("id,rater\n"), Error);
  const std::string header = std::string(survey::kCsvHeader) + "\n";
  CHECK(metrics::load_responses_csv(header).empty());
  CHECK_THROWS_AS(metrics::load_responses_csv(header + "1,r01,a1,9,1,3,e,r,e,r,j,t\n"), Error);
  CHECK_THROWS_AS(metrics::load_responses_csv(header + "1,r01,a1,3,7,3,e,r,e,r,j,t\n"), Error);
  CHECK_THROWS_AS(metrics::load_responses_csv(header + "1,r01,a1,3,1\n"), Error);
  const auto ok = metrics::load_responses_csv(header + "1,r01,a1,3,none,3,e,r,e,r,j,t\n");
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].answers.favorite == Favorite::None);
}
