// Serial reference vs OpenMP fan-out for the per-sheet and per-prompt stages.
// Arg = thread count; 1 runs the serial loop.

#include "stylevis/aws_ingest.hpp"
#include "stylevis/image_generation.hpp"
#include "stylevis/llm_provider.hpp"
#include "stylevis/prompt_synthesis.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace stylevis;

namespace {

const aws::Corpus& corpus() {
  static const aws::Corpus c = aws::load_corpus(std::filesystem::path(STYLEVIS_FIXTURES) / "corpus");
  return c;
}

std::vector<aws::RawAuthorSheet> scaled_sheets(int copies) {
  std::vector<aws::RawAuthorSheet> out;
  for (int k = 0; k < copies; ++k) {
    for (auto s : corpus().sheets) {
      s.author_id += "_" + std::to_string(k);
      out.push_back(std::move(s));
    }
  }
  return out;
}

void BM_CleanCorpus(benchmark::State& state) {
  const auto sheets = scaled_sheets(8);
  const aws::SheetCleaner cleaner(aws::CleaningRules::defaults());
  const auto exec = Execution::parallel(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aws::clean_corpus(sheets, cleaner, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(sheets.size()));
}

void BM_SynthesizeMock(benchmark::State& state) {
  const aws::SheetCleaner cleaner(aws::CleaningRules::defaults());
  const auto cleaned = aws::clean_corpus(scaled_sheets(4), cleaner, Execution::serial());
  const auto exec = Execution::parallel(static_cast<int>(state.range(0)));
  llm::MockLlmProvider provider;
  for (auto _ : state) benchmark::DoNotOptimize(prompts::synthesize_corpus(cleaned, provider, {}, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cleaned.size()));
}

void BM_GenerateMockImages(benchmark::State& state) {
  const aws::SheetCleaner cleaner(aws::CleaningRules::defaults());
  const auto cleaned = aws::clean_corpus(corpus().sheets, cleaner, Execution::serial());
  llm::MockLlmProvider llm;
  std::vector<prompts::PromptTriple> triples;
  for (auto& o : prompts::synthesize_corpus(cleaned, llm, {}, Execution::serial()))
    triples.push_back(*o.triple);
  const auto root = std::filesystem::temp_directory_path() / "stylevis-bench-images";
  const auto exec = Execution::parallel(static_cast<int>(state.range(0)));
  images::MockImageProvider provider;
  for (auto _ : state) {
    benchmark::DoNotOptimize(images::generate_corpus_images(triples, provider, {}, root, nullptr, exec));
  }
  std::filesystem::remove_all(root);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(triples.size() * 3));
}

}  // namespace

BENCHMARK(BM_CleanCorpus)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SynthesizeMock)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateMockImages)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
