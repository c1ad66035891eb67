#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emogap/keyed_text.hpp"
#include "emogap/segmenter.hpp"

namespace emogap {

enum class DetectorBackend { kEncoder, kBaseline };

std::string_view backend_name(DetectorBackend b) noexcept;
DetectorBackend parse_backend(std::string_view name);

struct DetectorConfig {
  DetectorBackend backend = DetectorBackend::kBaseline;
  // Loss is always cross-entropy and the optimizer always Adam.
  int batch_size = 32;
  double dropout_rate = 0.1;
  double learning_rate = 2e-5;
  int epochs = 3;
  std::uint64_t seed = 0;
  // Off by default: plain cross-entropy, no class reweighting.
  bool class_weighting = false;

  // encoder backend
  std::string encoder_checkpoint;  // local path or registry identifier
  int max_length = 128;            // longer inputs are truncated (and logged by the runner)
  std::string python = "python3";
  std::string encoder_runner;      // empty: EMOGAP_ENCODER_RUNNER or the bundled script

  // baseline backend: linear bag-of-tokens model
  double baseline_learning_rate = 0.05;
  int baseline_epochs = 10;
  double l2 = 1e-4;
  std::size_t min_df = 2;
  SegmenterConfig segmenter;

  void validate() const;  // throws ConfigError
  KeyedRecord to_record() const;
  static DetectorConfig from_record(const KeyedRecord& record);
};

struct TrainingExample {
  std::string post_id;
  std::string text;
  bool hidden = false;
};

struct TrainingFingerprint {
  std::vector<std::string> post_ids;  // sorted
  std::string sha256;

  static TrainingFingerprint of(std::span<const TrainingExample> examples);
  bool contains(const std::string& post_id) const;
};

class TrainedDetector {
 public:
  DetectorBackend backend() const noexcept { return config_.backend; }
  const DetectorConfig& config() const noexcept { return config_; }
  const TrainingFingerprint& fingerprint() const noexcept { return fingerprint_; }
  // Serialized parameters. For the encoder backend this lists the
  // fine-tuned weight files with their hashes; weights live in weights_dir().
  const std::string& blob() const noexcept { return blob_; }
  const std::filesystem::path& weights_dir() const noexcept { return weights_dir_; }

 private:
  friend TrainedDetector train(const DetectorConfig&, std::span<const TrainingExample>);
  friend TrainedDetector load_detector(const std::filesystem::path&);
  friend std::vector<double> predict_scores(const TrainedDetector&, std::span<const std::string>);

  DetectorConfig config_;
  TrainingFingerprint fingerprint_;
  std::string blob_;
  std::filesystem::path weights_dir_;
};

struct PredictionRecord {
  std::string post_id;
  double score = 0.0;
  bool decision = false;
};

// Throws TrainingError for single-class data, ConfigError for a bad config
// or a missing encoder checkpoint.
TrainedDetector train(const DetectorConfig& config, std::span<const TrainingExample> examples);

// Positive-class probabilities, aligned with texts. IntegrityError for a
// corrupt parameter blob.
std::vector<double> predict_scores(const TrainedDetector& model, std::span<const std::string> texts);

// decision = score >= threshold. ids may be empty (records get positional ids).
std::vector<PredictionRecord> classify(std::span<const double> scores, double threshold = 0.5,
                                       std::span<const std::string> post_ids = {});

// Artifact directory: config.txt, params.blob, fingerprint.txt (+ encoder/).
void save_detector(const TrainedDetector& model, const std::filesystem::path& dir);
TrainedDetector load_detector(const std::filesystem::path& dir);

// TSV: post_id, score, decision
std::string predictions_to_tsv(std::span<const PredictionRecord> records);
std::vector<PredictionRecord> predictions_from_tsv(std::string_view tsv);

namespace detail {

// Baseline logistic model over token counts.
struct BaselineModel {
  Vocabulary vocabulary;
  std::vector<double> weights;  // aligned with vocabulary.tokens
  double bias = 0.0;
};

BaselineModel fit_baseline(const DetectorConfig& config, std::span<const TrainingExample> examples);
double baseline_score(const BaselineModel& model, const Tokens& tokens);
std::string encode_baseline(const BaselineModel& model);
BaselineModel decode_baseline(std::string_view blob);

// Encoder runner plumbing.
std::filesystem::path resolve_runner(const DetectorConfig& config);
bool checkpoint_missing(const std::string& checkpoint);
std::string run_encoder_training(const DetectorConfig& config, std::span<const TrainingExample> examples,
                                 const std::filesystem::path& weights_dir);
std::vector<double> run_encoder_prediction(const DetectorConfig& config, const std::filesystem::path& weights_dir,
                                           std::span<const std::string> texts);
void verify_encoder_blob(std::string_view blob, const std::filesystem::path& weights_dir);

}  // namespace detail

}  // namespace emogap
