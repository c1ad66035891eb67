#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "emogap/detector.hpp"
#include "emogap/labels.hpp"
#include "emogap/metrics.hpp"
#include "emogap/miner.hpp"
#include "emogap/segmenter.hpp"
#include "emogap/synthetic.hpp"

namespace {

struct ScoredSet {
  std::vector<double> scores;
  std::unique_ptr<bool[]> labels;
  std::size_t n;

  explicit ScoredSet(std::size_t size) : scores(size), labels(new bool[size]), n(size) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = u(gen);
      labels[i] = u(gen) < 0.1 || i == 0;
    }
    labels[1] = false;
  }
  std::span<const bool> span() const { return {labels.get(), n}; }
};

emogap::PlantedCorpus& planted() {
  static auto corpus = [] {
    emogap::PlantedCorpusSpec spec;
    spec.posts = 5000;
    return emogap::generate_planted_corpus(spec);
  }();
  return corpus;
}

void BM_AucRank(benchmark::State& state) {
  ScoredSet set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(emogap::auc_rank(set.scores, set.span()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AucRank)->Range(1 << 10, 1 << 18)->Complexity();

void BM_RocCurve(benchmark::State& state) {
  ScoredSet set(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(emogap::roc_curve(set.scores, set.span()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RocCurve)->Range(1 << 10, 1 << 18)->Complexity();

void BM_HiddenLabels(benchmark::State& state) {
  const auto& corpus = planted().corpus;
  for (auto _ : state) benchmark::DoNotOptimize(emogap::derive_hidden_labels(corpus, emogap::Emotion::kAnger));
}
BENCHMARK(BM_HiddenLabels);

void BM_Segment(benchmark::State& state) {
  emogap::SegmenterConfig config;
  config.mode = state.range(0) == 0 ? emogap::SegmentMode::kWhitespace : emogap::SegmentMode::kCharNgram;
  emogap::Segmenter segmenter(config);
  std::vector<std::string> texts;
  for (const auto& p : planted().corpus) texts.push_back(p.text);
  for (auto _ : state) benchmark::DoNotOptimize(segmenter.segment_all(texts));
}
BENCHMARK(BM_Segment)->Arg(0)->Arg(1);

void BM_ExpressionRanking(benchmark::State& state) {
  emogap::Segmenter segmenter(emogap::SegmenterConfig{});
  std::vector<emogap::Tokens> hidden, other;
  const auto& p = planted();
  for (std::size_t i = 0; i < p.corpus.size(); ++i) {
    (p.hidden[i] ? hidden : other).push_back(segmenter.segment(p.corpus[i].text));
  }
  for (auto _ : state) benchmark::DoNotOptimize(emogap::expression_ranking(hidden, other));
}
BENCHMARK(BM_ExpressionRanking);

void BM_BaselineTrain(benchmark::State& state) {
  std::vector<emogap::TrainingExample> examples;
  const auto& p = planted();
  for (std::size_t i = 0; i < p.corpus.size(); ++i) {
    examples.push_back({p.corpus[i].post_id, p.corpus[i].text, p.hidden[i]});
  }
  emogap::DetectorConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(emogap::train(config, examples).blob());
}
BENCHMARK(BM_BaselineTrain)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
