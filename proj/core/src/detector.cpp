#include "emogap/detector.hpp"

#include <algorithm>
#include <atomic>

#include "emogap/errors.hpp"
#include "emogap/hashing.hpp"

#include <unistd.h>

namespace emogap {
namespace {

std::filesystem::path fresh_weights_dir() {
  static std::atomic<unsigned> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("emogap-encoder-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

std::string_view backend_name(DetectorBackend b) noexcept {
  return b == DetectorBackend::kEncoder ? "encoder" : "baseline";
}

DetectorBackend parse_backend(std::string_view name) {
  if (name == "encoder") return DetectorBackend::kEncoder;
  if (name == "baseline") return DetectorBackend::kBaseline;
  throw ConfigError("unknown detector backend '" + std::string(name) + "'");
}

void DetectorConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must lie in [0, 1)");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(baseline_learning_rate > 0.0)) throw ConfigError("baseline_learning_rate must be positive");
  if (baseline_epochs < 1) throw ConfigError("baseline_epochs must be >= 1");
  if (l2 < 0.0) throw ConfigError("l2 must be non-negative");
  if (min_df < 1) throw ConfigError("min_df must be >= 1");
  if (max_length < 8) throw ConfigError("max_length must be >= 8");
  segmenter.validate();
}

KeyedRecord DetectorConfig::to_record() const {
  KeyedRecord r;
  r.set("backend", std::string(backend_name(backend)));
  r.set("loss", "cross-entropy");
  r.set("optimizer", "adam");
  r.set_number("batch_size", batch_size);
  r.set_number("dropout_rate", dropout_rate);
  r.set_number("learning_rate", learning_rate);
  r.set_number("epochs", epochs);
  r.set("seed", std::to_string(seed));
  r.set("class_weighting", class_weighting ? "true" : "false");
  r.set("encoder_checkpoint", encoder_checkpoint);
  r.set_number("max_length", max_length);
  r.set("python", python);
  r.set("encoder_runner", encoder_runner);
  r.set_number("baseline_learning_rate", baseline_learning_rate);
  r.set_number("baseline_epochs", baseline_epochs);
  r.set_number("l2", l2);
  r.set_number("min_df", min_df);
  r.set("segmenter.mode", std::string(segment_mode_name(segmenter.mode)));
  r.set_number("segmenter.ngram_n", segmenter.ngram_n);
  r.set("segmenter.normalizer", std::string(normalizer_name(segmenter.normalizer)));
  r.set("segmenter.adapter", segmenter.adapter);
  return r;
}

DetectorConfig DetectorConfig::from_record(const KeyedRecord& r) {
  DetectorConfig c;
  if (auto v = r.find("backend")) c.backend = parse_backend(*v);
  if (auto v = r.find("loss"); v && *v != "cross-entropy") throw ConfigError("only cross-entropy loss is supported");
  if (auto v = r.find("optimizer"); v && *v != "adam") throw ConfigError("only the adam optimizer is supported");
  if (r.has("batch_size")) c.batch_size = static_cast<int>(r.get_int("batch_size"));
  if (r.has("dropout_rate")) c.dropout_rate = r.get_double("dropout_rate");
  if (r.has("learning_rate")) c.learning_rate = r.get_double("learning_rate");
  if (r.has("epochs")) c.epochs = static_cast<int>(r.get_int("epochs"));
  if (auto v = r.find("seed")) c.seed = std::stoull(*v);
  if (auto v = r.find("class_weighting")) c.class_weighting = *v == "true" || *v == "1";
  if (auto v = r.find("encoder_checkpoint")) c.encoder_checkpoint = *v;
  if (r.has("max_length")) c.max_length = static_cast<int>(r.get_int("max_length"));
  if (auto v = r.find("python")) c.python = *v;
  if (auto v = r.find("encoder_runner")) c.encoder_runner = *v;
  if (r.has("baseline_learning_rate")) c.baseline_learning_rate = r.get_double("baseline_learning_rate");
  if (r.has("baseline_epochs")) c.baseline_epochs = static_cast<int>(r.get_int("baseline_epochs"));
  if (r.has("l2")) c.l2 = r.get_double("l2");
  if (r.has("min_df")) c.min_df = static_cast<std::size_t>(r.get_int("min_df"));
  if (auto v = r.find("segmenter.mode")) c.segmenter.mode = parse_segment_mode(*v);
  if (r.has("segmenter.ngram_n")) c.segmenter.ngram_n = static_cast<int>(r.get_int("segmenter.ngram_n"));
  if (auto v = r.find("segmenter.normalizer")) c.segmenter.normalizer = parse_normalizer(*v);
  if (auto v = r.find("segmenter.adapter")) c.segmenter.adapter = *v;
  return c;
}

TrainingFingerprint TrainingFingerprint::of(std::span<const TrainingExample> examples) {
  TrainingFingerprint fp;
  fp.post_ids.reserve(examples.size());
  for (const auto& ex : examples) fp.post_ids.push_back(ex.post_id);
  std::sort(fp.post_ids.begin(), fp.post_ids.end());
  std::string joined;
  for (const auto& id : fp.post_ids) {
    joined += id;
    joined += '\n';
  }
  fp.sha256 = sha256_hex(joined);
  return fp;
}

bool TrainingFingerprint::contains(const std::string& post_id) const {
  return std::binary_search(post_ids.begin(), post_ids.end(), post_id);
}

TrainedDetector train(const DetectorConfig& config, std::span<const TrainingExample> examples) {
  config.validate();
  const auto positives = std::count_if(examples.begin(), examples.end(), [](const auto& e) { return e.hidden; });
  if (positives == 0 || static_cast<std::size_t>(positives) == examples.size()) {
    throw TrainingError("training data must contain both hidden and non-hidden examples");
  }

  TrainedDetector model;
  model.config_ = config;
  model.fingerprint_ = TrainingFingerprint::of(examples);
  switch (config.backend) {
    case DetectorBackend::kBaseline:
      model.blob_ = detail::encode_baseline(detail::fit_baseline(config, examples));
      break;
    case DetectorBackend::kEncoder: {
      if (detail::checkpoint_missing(config.encoder_checkpoint)) {
        throw ConfigError("encoder backend needs an existing checkpoint (got '" + config.encoder_checkpoint + "')");
      }
      model.weights_dir_ = fresh_weights_dir();
      model.blob_ = detail::run_encoder_training(config, examples, model.weights_dir_);
      break;
    }
  }
  return model;
}

std::vector<double> predict_scores(const TrainedDetector& model, std::span<const std::string> texts) {
  if (texts.empty()) return {};
  std::vector<double> scores;
  switch (model.backend()) {
    case DetectorBackend::kBaseline: {
      const auto baseline = detail::decode_baseline(model.blob_);
      const auto docs = Segmenter(model.config_.segmenter).segment_all(texts);
      scores.reserve(docs.size());
      for (const auto& doc : docs) scores.push_back(detail::baseline_score(baseline, doc));
      break;
    }
    case DetectorBackend::kEncoder:
      detail::verify_encoder_blob(model.blob_, model.weights_dir_);
      scores = detail::run_encoder_prediction(model.config_, model.weights_dir_, texts);
      break;
  }
  for (double& s : scores) s = std::clamp(s, 0.0, 1.0);
  return scores;
}

std::vector<PredictionRecord> classify(std::span<const double> scores, double threshold,
                                       std::span<const std::string> post_ids) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ArgumentError("threshold must lie in (0, 1)");
  if (!post_ids.empty() && post_ids.size() != scores.size()) {
    throw ArgumentError("post ids and scores differ in length");
  }
  std::vector<PredictionRecord> out;
  out.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.push_back({post_ids.empty() ? std::to_string(i) : post_ids[i], scores[i], scores[i] >= threshold});
  }
  return out;
}

void save_detector(const TrainedDetector& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_block_file(dir / "config.txt", model.config().to_record());
  write_file(dir / "params.blob", model.blob());
  KeyedRecord fp;
  fp.set("sha256", model.fingerprint().sha256);
  fp.set_number("count", model.fingerprint().post_ids.size());
  std::string ids;
  for (const auto& id : model.fingerprint().post_ids) {
    if (!ids.empty()) ids += ' ';
    ids += id;
  }
  fp.set("post_ids", ids);
  write_block_file(dir / "fingerprint.txt", fp);
  if (model.backend() == DetectorBackend::kEncoder) {
    const auto target = dir / "encoder";
    if (std::filesystem::weakly_canonical(target) != std::filesystem::weakly_canonical(model.weights_dir())) {
      std::filesystem::remove_all(target);
      std::filesystem::copy(model.weights_dir(), target, std::filesystem::copy_options::recursive);
    }
  }
}

TrainedDetector load_detector(const std::filesystem::path& dir) {
  TrainedDetector model;
  try {
    model.config_ = DetectorConfig::from_record(read_block_file(dir / "config.txt"));
    model.blob_ = read_file(dir / "params.blob");
    const auto fp = read_block_file(dir / "fingerprint.txt");
    model.fingerprint_.sha256 = fp.get("sha256");
    const auto& ids = fp.get("post_ids");
    std::size_t start = 0;
    while (start < ids.size()) {
      auto sp = ids.find(' ', start);
      model.fingerprint_.post_ids.push_back(ids.substr(start, sp == std::string::npos ? std::string::npos : sp - start));
      if (sp == std::string::npos) break;
      start = sp + 1;
    }
  } catch (const IntegrityError&) {
    throw;
  } catch (const Error& e) {
    throw IntegrityError("cannot load detector from '" + dir.string() + "': " + e.what());
  }
  if (model.backend() == DetectorBackend::kBaseline) {
    detail::decode_baseline(model.blob_);  // integrity check up front
  } else {
    model.weights_dir_ = dir / "encoder";
    detail::verify_encoder_blob(model.blob_, model.weights_dir_);
  }
  return model;
}

std::string predictions_to_tsv(std::span<const PredictionRecord> records) {
  std::string out = "post_id\tscore\tdecision\n";
  for (const auto& r : records) {
    out += r.post_id + '\t' + KeyedRecord::format_number(r.score) + (r.decision ? "\t1\n" : "\t0\n");
  }
  return out;
}

std::vector<PredictionRecord> predictions_from_tsv(std::string_view tsv) {
  std::vector<PredictionRecord> out;
  std::size_t start = 0;
  bool header = true;
  while (start < tsv.size()) {
    auto nl = tsv.find('\n', start);
    auto line = tsv.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? tsv.size() : nl + 1;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto t1 = line.find('\t');
    auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string_view::npos || t2 == std::string_view::npos) throw IoError("malformed predictions row");
    out.push_back({std::string(line.substr(0, t1)), std::stod(std::string(line.substr(t1 + 1, t2 - t1 - 1))),
                   line.substr(t2 + 1) == "1"});
  }
  return out;
}

}  // namespace emogap
