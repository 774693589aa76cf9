// Acceptance suite: one PASS/FAIL line per headline criterion, each with a
// pinned wall-clock limit. Exit status is nonzero when any line fails.

#include "stylevis/cli.hpp"
#include "stylevis/evaluation_metrics.hpp"
#include "stylevis/image_generation.hpp"
#include "stylevis/manifest.hpp"
#include "stylevis/pipeline.hpp"
#include "stylevis/study_design.hpp"
#include "stylevis/text.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace stylevis;
using testsupport::TempDir;

namespace {

constexpr double kMetricTolerance = 1e-9;

struct Verdict {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

int g_failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.ok = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (v.ok && secs >= limit_seconds) {
    v.ok = false;
    v.detail = "over time limit";
  }
  if (!v.ok) ++g_failures;
  std::printf("%s  %-28s %8.3f s (limit %.0f s)%s%s\n", v.ok ? "PASS" : "FAIL", name.c_str(), secs,
              limit_seconds, v.detail.empty() ? "" : "  ", v.detail.c_str());
  std::fflush(stdout);
}

Verdict favorite_identity() {
  Verdict v;
  const std::size_t counts[4] = {33, 27, 38, 0};
  const auto responses = testsupport::responses_with_favorites(counts);
  v.expect(responses.size() == 98, "fixture size");
  const auto dist = metrics::favorite_distribution(responses);
  const char* want[4] = {"33.67", "27.55", "38.78", "0.00"};
  for (int k = 0; k < 4; ++k) {
    v.expect(dist[k].count == counts[k], "count " + std::to_string(k));
    v.expect(dist[k].display == want[k], "display " + dist[k].display + " != " + want[k]);
  }
  v.expect(dist[3].category == survey::Favorite::None, "none is last");
  return v;
}

Verdict irr_identities() {
  Verdict v;
  const auto rating = testsupport::pairs_with_diffs(49, 36, 44);
  const auto distinct = testsupport::pairs_with_diffs(49, 59, 31);
  v.expect(rating.size() == 49 && distinct.size() == 49, "fixture construction");
  if (!v.ok) return v;
  const auto report = metrics::build_report(testsupport::study_from_pairs(rating, distinct, 20));
  const auto d = nlohmann::json::parse(metrics::report_to_json(report))["irr"]["display"];
  v.expect(report.n_items == 49, "49 pairs");
  v.expect(d["rating_mean_abs_diff"] == "0.735", "rating MAD");
  v.expect(d["rating_within_one_pct"] == "89.80", "rating within one");
  v.expect(d["distinct_mean_abs_diff"] == "1.204", "distinctiveness MAD");
  v.expect(d["distinct_within_one_pct"] == "63.27", "distinctiveness within one");
  v.expect(d["favorite_agreement_pct"] == "40.82", "favorite agreement");
  return v;
}

Verdict study_shape() {
  Verdict v;
  study::StudyConfig c;
  for (int i = 0; i < 49; ++i) c.item_ids.push_back("author" + std::to_string(i));
  for (int r = 1; r <= 10; ++r) c.rater_ids.push_back("r" + std::to_string(r));
  c.coverage = 2;
  std::vector<std::size_t> want(9, 10);
  want.insert(want.begin(), 8);
  std::mt19937_64 seeds(20250301);
  for (int trial = 0; trial < 100; ++trial) {
    c.shuffle_seed = trial < 10 ? static_cast<std::uint64_t>(trial) : seeds();
    const auto plan = study::make_assignment(c);
    std::vector<std::size_t> loads;
    for (const auto& r : plan.per_rater) loads.push_back(r.items.size());
    std::sort(loads.begin(), loads.end());
    const auto tag = " (seed " + std::to_string(c.shuffle_seed) + ")";
    v.expect(plan.total_slots() == 98, "98 slots" + tag);
    v.expect(loads == want, "load multiset" + tag);
    v.expect(study::validate_assignment(plan, c).empty(), "validation" + tag);
  }
  return v;
}

std::vector<images::ImageArtifact> without_timestamps(std::vector<images::ImageArtifact> v) {
  for (auto& a : v) a.created_at.clear();
  return v;
}

struct PipelineRun {
  TempDir dir;
  int exit_code = -1;
  std::vector<images::ImageArtifact> manifest;
  std::vector<prompts::PromptTriple> triples;
};

std::unique_ptr<PipelineRun> run_pipeline() {
  auto run = std::make_unique<PipelineRun>();
  std::ostringstream out;
  std::ostringstream err;
  run->exit_code = cli::run({"all", "--mock", "--seed", "1234", "--corpus",
                             testsupport::fixture("corpus").string(), "--out",
                             run->dir.path().string()},
                            out, err);
  if (run->exit_code == 0) {
    run->manifest = images::read_manifest(run->dir / "manifest.jsonl");
    run->triples = pipeline::load_prompt_triples(run->dir.path());
  }
  return run;
}

std::unique_ptr<PipelineRun> g_first_run;

Verdict pipeline_cardinality() {
  Verdict v;
  g_first_run = run_pipeline();
  const auto second = run_pipeline();
  v.expect(g_first_run->exit_code == 0 && second->exit_code == 0, "all --mock exit code");
  if (!v.ok) return v;
  v.expect(g_first_run->triples.size() == 49, "49 triples");
  for (const auto& t : g_first_run->triples) {
    std::set<std::string> distinct;
    for (const auto& p : t.prompts) distinct.insert(p.rendered);
    v.expect(t.prompts.size() == 3 && distinct.size() == 3, "3 distinct prompts for " + t.author_id);
  }
  std::size_t ok = 0;
  for (const auto& a : g_first_run->manifest) ok += a.status == images::ArtifactStatus::Ok;
  v.expect(g_first_run->manifest.size() == 147 && ok == 147, "147 successful manifest entries");
  v.expect(without_timestamps(g_first_run->manifest) == without_timestamps(second->manifest),
           "manifest differs between runs");
  return v;
}

Verdict prompt_suffix() {
  Verdict v;
  const std::string suffix(images::kDefaultPositiveModifiers);
  v.expect(suffix ==
               "8k, highly detailed, masterpiece, perfect composition, intricate details, "
               "professional quality, cinematic lighting",
           "default modifier string");
  v.expect(g_first_run && g_first_run->manifest.size() == 147, "pipeline run available");
  if (!v.ok) return v;
  for (const auto& a : g_first_run->manifest) {
    v.expect(a.final_prompt.ends_with(suffix), "suffix on " + a.author_id);
    v.expect(text::count_occurrences(a.final_prompt, suffix) == 1, "suffix once on " + a.author_id);
    v.expect(a.final_prompt == a.core_prompt + ", " + suffix, "core preserved on " + a.author_id);
  }
  return v;
}

Verdict metrics_oracle() {
  Verdict v;
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t items = 5 + rng() % 46;
    const auto responses = testsupport::random_complete_study(rng, items);
    const auto report = metrics::build_report(responses);
    const auto diffs =
        testsupport::compare_report(report, testsupport::reference_report(responses), kMetricTolerance);
    v.expect(diffs.empty(), "trial " + std::to_string(trial) + ": " + (diffs.empty() ? "" : diffs[0]));
    v.expect(report.n_items == items, "trial " + std::to_string(trial) + ": item count");
  }
  return v;
}

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> atoms = {"a", "Z", " ", ",", "\"", "\n", "\r\n", "'",
                                                 "\\", "{", "}", "é", "猫", "\t", "0", ";"};
  std::string s;
  const auto len = rng() % 12;
  for (std::size_t i = 0; i < len; ++i) s += atoms[rng() % atoms.size()];
  return s;
}

Verdict round_trips() {
  Verdict v;
  std::mt19937_64 rng(31337);
  TempDir dir;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<images::ImageArtifact> artifacts;
    const auto n = 1 + rng() % 10;
    for (std::size_t i = 0; i < n; ++i) {
      images::ImageArtifact a;
      a.author_id = "author" + std::to_string(i);
      a.prompt_index = 1 + static_cast<int>(rng() % 3);
      a.core_prompt = "core " + random_text(rng);
      a.final_prompt = a.core_prompt + ", " + random_text(rng);
      a.negative_prompt = random_text(rng);
      a.seed = rng() & 0xffffffffULL;
      a.model_id = random_text(rng);
      a.created_at = text::utc_timestamp();
      if (rng() % 4 == 0) {
        a.status = images::ArtifactStatus::Failed;
        a.error = random_text(rng);
      } else {
        a.image_path = "images/" + a.author_id + "/" + std::to_string(a.prompt_index) + ".ppm";
        a.content_digest = std::string(64, "0123456789abcdef"[rng() % 16]);
      }
      artifacts.push_back(std::move(a));
    }
    const auto path = dir / ("m" + std::to_string(trial) + ".jsonl");
    images::rewrite_manifest_canonical(artifacts, path);
    std::sort(artifacts.begin(), artifacts.end(), [](const auto& x, const auto& y) {
      return std::tie(x.author_id, x.prompt_index) < std::tie(y.author_id, y.prompt_index);
    });
    const auto read = images::read_manifest(path, {.verify_files = false});
    v.expect(read == artifacts, "manifest case " + std::to_string(trial));
  }
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<survey::SurveyResponse> responses;
    const auto n = rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      survey::SurveyResponse r;
      r.id = i + 1;
      auto& a = r.answers;
      a.rater_id = "r" + std::to_string(rng() % 10);
      a.item_id = "item " + random_text(rng);
      a.rating = 1 + static_cast<int>(rng() % 5);
      a.distinctiveness = 1 + static_cast<int>(rng() % 5);
      a.favorite = static_cast<survey::Favorite>(rng() % 4);
      a.q2 = {{{random_text(rng), random_text(rng)}, {random_text(rng), random_text(rng)}}};
      a.favorite_justification = random_text(rng);
      r.submitted_at = text::utc_timestamp();
      responses.push_back(std::move(r));
    }
    const auto back = metrics::load_responses_csv(survey::export_csv(responses));
    v.expect(back == responses, "csv case " + std::to_string(trial));
  }
  return v;
}

}  // namespace

int main() {
  criterion("favorite-distribution", 1, favorite_identity);
  criterion("irr-identities", 1, irr_identities);
  criterion("study-shape", 5, study_shape);
  criterion("pipeline-cardinality", 60, pipeline_cardinality);
  criterion("prompt-suffix", 1, prompt_suffix);
  criterion("metrics-oracle", 30, metrics_oracle);
  criterion("round-trips", 10, round_trips);
  g_first_run.reset();
  std::printf("%d of 7 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
