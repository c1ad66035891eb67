#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "emogap/corpus.hpp"
#include "emogap/detector.hpp"
#include "emogap/keyed_text.hpp"
#include "emogap/labels.hpp"
#include "emogap/miner.hpp"
#include "emogap/segmenter.hpp"

namespace emogap {

enum class MiningPool { kTest, kCorpus };

struct PipelineConfig {
  std::filesystem::path corpus_path;
  ColumnMapping columns = ColumnMapping::defaults();
  Emotion emotion = Emotion::kAnger;
  double gap_threshold = 2.0;
  double strong_threshold = 2.0;
  SplitRatio ratio{4, 1};
  SplitMode split_mode = SplitMode::kRandom;
  std::uint64_t seed = 0;
  SegmenterConfig segmenter;
  DetectorConfig detector;
  double threshold = 0.5;
  std::size_t top_k = 10;
  std::size_t min_hidden_count = 5;
  RateMode rate_mode = RateMode::kPresence;
  MiningPool unfiltered_pool = MiningPool::kTest;
  std::size_t example_count = 5;
  std::filesystem::path out_dir = "emogap-out";

  void validate() const;  // throws ConfigError

  // Keys: corpus, emotion, gap_threshold, strong_threshold, ratio ("4:1"),
  // split_mode, seed, segmenter.*, detector.*, threshold, top_k,
  // min_hidden_count, rate_mode, mining_pool, examples, out, column.*.
  // Keys absent from the record keep their current value.
  void apply(const KeyedRecord& record);
  KeyedRecord to_record() const;
};

// Relative artifact names inside the output directory.
namespace artifact {
inline constexpr const char* kRunConfig = "run_config.txt";
inline constexpr const char* kCorpus = "corpus.records";
inline constexpr const char* kLabels = "labels.tsv";
inline constexpr const char* kCoocWriter = "cooccurrence_writer.tsv";
inline constexpr const char* kCoocReader = "cooccurrence_reader.tsv";
inline constexpr const char* kStrongCounts = "strong_counts.txt";
inline constexpr const char* kSplit = "split.txt";
inline constexpr const char* kModelDir = "model";
inline constexpr const char* kPredictions = "predictions.tsv";
inline constexpr const char* kRoc = "roc.tsv";
inline constexpr const char* kMetrics = "metrics.txt";
inline constexpr const char* kRankingFiltered = "ranking_filtered.tsv";
inline constexpr const char* kRankingUnfiltered = "ranking_unfiltered.tsv";
inline constexpr const char* kIntensity = "intensity.tsv";
inline constexpr const char* kTruePositives = "true_positives.txt";
inline constexpr const char* kMining = "mining.txt";
inline constexpr const char* kHeatmapWriter = "report/cooccurrence_writer.svg";
inline constexpr const char* kHeatmapReader = "report/cooccurrence_reader.svg";
inline constexpr const char* kRocSvg = "report/roc.svg";
inline constexpr const char* kRankingFilteredSvg = "report/ranking_filtered.svg";
inline constexpr const char* kRankingUnfilteredSvg = "report/ranking_unfiltered.svg";
inline constexpr const char* kIntensityReport = "report/intensity.tsv";
inline constexpr const char* kExamples = "report/examples.txt";
inline constexpr const char* kManifest = "manifest.txt";
}  // namespace artifact

struct RunManifest {
  std::filesystem::path out_dir;
  std::vector<std::pair<std::string, std::string>> artifacts;  // relative path, sha256
  KeyedRecord summary;

  bool lists(std::string_view path) const;
  std::string to_text() const;
  static RunManifest parse(std::string_view text, std::filesystem::path out_dir);
};

// Individual stages. Each reads earlier stages' artifacts from
// config.out_dir and persists its own; failures raise StageError and
// remove whatever the stage wrote.
void stage_ingest(const PipelineConfig& config);
void stage_stats(const PipelineConfig& config);
void stage_split(const PipelineConfig& config);
void stage_train(const PipelineConfig& config);
void stage_evaluate(const PipelineConfig& config);
void stage_mine(const PipelineConfig& config);

// Hashes every artifact present in out_dir and writes manifest.txt.
RunManifest refresh_manifest(const std::filesystem::path& out_dir);
RunManifest load_manifest(const std::filesystem::path& out_dir);

// ingest -> stats -> split -> train -> evaluate -> mine -> report.
// On failure every artifact written by this run is removed.
RunManifest run_pipeline(const PipelineConfig& config);

// Figures and tables rendered only from the manifest's artifacts. Throws
// StageError("report", ...) naming a missing artifact.
RunManifest emit_report(const RunManifest& manifest);

// Per-stage seeds derived from the run seed.
std::uint64_t split_seed(const PipelineConfig& config);
std::uint64_t train_seed(const PipelineConfig& config);

}  // namespace emogap
