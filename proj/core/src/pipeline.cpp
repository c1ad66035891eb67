#include "emogap/pipeline.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <unordered_map>

#include "emogap/errors.hpp"
#include "emogap/hashing.hpp"
#include "emogap/metrics.hpp"

namespace emogap {
namespace {

// Records every file a stage writes so a failed stage can be undone.
class ArtifactSink {
 public:
  explicit ArtifactSink(std::filesystem::path root) : root_(std::move(root)) {}

  void write(const std::string& rel, std::string_view content) {
    written_.push_back(rel);
    write_file(root_ / rel, content);
  }
  void track(const std::string& rel) { written_.push_back(rel); }

  void roll_back() noexcept {
    for (auto it = written_.rbegin(); it != written_.rend(); ++it) {
      std::error_code ec;
      std::filesystem::remove_all(root_ / *it, ec);
    }
    written_.clear();
  }
  const std::vector<std::string>& written() const noexcept { return written_; }
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> written_;
};

template <typename Fn>
void run_stage(const char* name, ArtifactSink& sink, Fn&& fn) {
  const auto mark = sink.written().size();
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    // Undo only this stage's files; run_pipeline undoes the rest.
    ArtifactSink local(sink.root());
    for (std::size_t i = mark; i < sink.written().size(); ++i) local.track(sink.written()[i]);
    local.roll_back();
    throw StageError(name, e.what());
  }
}

Corpus load_corpus(const PipelineConfig& c) { return deserialize_corpus(read_file(c.out_dir / artifact::kCorpus)); }

std::vector<HiddenLabel> load_labels(const PipelineConfig& c) {
  return labels_from_tsv(read_file(c.out_dir / artifact::kLabels));
}

DatasetSplit load_split(const PipelineConfig& c, const Corpus& corpus) {
  return split_from_record(read_block_file(c.out_dir / artifact::kSplit), corpus);
}

std::string ratio_text(SplitRatio r) { return std::to_string(r.train) + ":" + std::to_string(r.test); }

SplitRatio parse_ratio(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("ratio must look like 4:1");
  try {
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("ratio must look like 4:1");
  }
}

DetectorConfig effective_detector(const PipelineConfig& c) {
  DetectorConfig d = c.detector;
  d.seed = train_seed(c);
  d.segmenter = c.segmenter;
  return d;
}

struct TestView {
  std::vector<const AnnotatedPost*> posts;  // corpus order
  std::vector<HiddenLabel> labels;          // aligned with posts
};

TestView test_view(const Corpus& corpus, const std::vector<HiddenLabel>& labels, const DatasetSplit& split) {
  if (labels.size() != corpus.size()) throw IoError("labels do not cover the corpus");
  TestView view;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (split.test_ids.count(corpus[i].post_id)) {
      view.posts.push_back(&corpus[i]);
      view.labels.push_back(labels[i]);
    }
  }
  return view;
}

std::vector<std::string> known_artifacts() {
  return {artifact::kRunConfig,        artifact::kCorpus,          artifact::kLabels,
          artifact::kCoocWriter,       artifact::kCoocReader,      artifact::kStrongCounts,
          artifact::kSplit,            "model/config.txt",         "model/params.blob",
          "model/fingerprint.txt",     artifact::kPredictions,     artifact::kRoc,
          artifact::kMetrics,          artifact::kRankingFiltered, artifact::kRankingUnfiltered,
          artifact::kIntensity,        artifact::kTruePositives,   artifact::kMining,
          artifact::kHeatmapWriter,    artifact::kHeatmapReader,   artifact::kRocSvg,
          artifact::kRankingFilteredSvg, artifact::kRankingUnfilteredSvg, artifact::kIntensityReport,
          artifact::kExamples};
}

void do_ingest(const PipelineConfig& c, ArtifactSink& sink) {
  if (c.corpus_path.empty()) throw ConfigError("no corpus path given");
  const auto raw = read_file(c.corpus_path);
  const auto corpus = parse_corpus_text(raw, c.columns);
  for (const auto& post : corpus) {
    auto violations = validate_post(post);
    if (!violations.empty()) {
      throw ArgumentError("post '" + post.post_id + "': " + violations.front().field + " " + violations.front().rule);
    }
  }
  auto snapshot = c.to_record();
  snapshot.set("corpus_sha256", sha256_hex(raw));
  sink.write(artifact::kRunConfig, snapshot.to_block());
  sink.write(artifact::kCorpus, serialize_corpus(corpus));
}

void do_stats(const PipelineConfig& c, ArtifactSink& sink) {
  const auto corpus = load_corpus(c);
  const auto labels = derive_hidden_labels(corpus, c.emotion, c.gap_threshold);
  sink.write(artifact::kLabels, labels_to_tsv(labels));
  sink.write(artifact::kCoocWriter, matrix_to_tsv(cooccurrence_matrix(corpus, LabelSource::kWriter, c.strong_threshold)));
  sink.write(artifact::kCoocReader,
             matrix_to_tsv(cooccurrence_matrix(corpus, LabelSource::kReaderAverage, c.strong_threshold)));

  KeyedRecord counts;
  counts.set("emotion", std::string(emotion_name(c.emotion)));
  counts.set_number("strong_threshold", c.strong_threshold);
  counts.set_number("posts", corpus.size());
  counts.set_number("hidden", static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(),
                                                                       [](const auto& l) { return l.hidden; })));
  for (auto e : kAllEmotions) {
    const std::string name(emotion_name(e));
    for (auto mode : kAllReaderCountModes) {
      const auto sc = strong_label_counts(corpus, e, c.strong_threshold, mode);
      if (mode == ReaderCountMode::kAverage) counts.set_number("writer." + name, sc.writer_count);
      counts.set_number("reader." + std::string(reader_count_mode_name(mode)) + "." + name, sc.reader_count);
    }
  }
  sink.write(artifact::kStrongCounts, counts.to_block());
}

void do_split(const PipelineConfig& c, ArtifactSink& sink) {
  const auto corpus = load_corpus(c);
  SplitOptions options;
  options.mode = c.split_mode;
  std::unique_ptr<bool[]> strata;
  if (c.split_mode == SplitMode::kStratified) {
    const auto labels = load_labels(c);
    strata = std::make_unique<bool[]>(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) strata[i] = labels[i].hidden;
    options.strata = std::span<const bool>(strata.get(), labels.size());
  }
  const auto split = split_dataset(corpus, c.ratio, split_seed(c), options);
  sink.write(artifact::kSplit, split_to_record(split).to_block());
}

void do_train(const PipelineConfig& c, ArtifactSink& sink) {
  const auto corpus = load_corpus(c);
  const auto labels = load_labels(c);
  const auto split = load_split(c, corpus);
  std::vector<TrainingExample> examples;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (split.train_ids.count(corpus[i].post_id)) {
      examples.push_back({corpus[i].post_id, corpus[i].text, labels[i].hidden});
    }
  }
  const auto model = train(effective_detector(c), examples);
  for (const auto& id : split.test_ids) {
    if (model.fingerprint().contains(id)) throw TrainingError("test id '" + id + "' leaked into training");
  }
  sink.track(artifact::kModelDir);
  save_detector(model, c.out_dir / artifact::kModelDir);
  if (!model.weights_dir().empty()) std::filesystem::remove_all(model.weights_dir());
}

void do_evaluate(const PipelineConfig& c, ArtifactSink& sink) {
  const auto corpus = load_corpus(c);
  const auto labels = load_labels(c);
  const auto split = load_split(c, corpus);
  const auto model = load_detector(c.out_dir / artifact::kModelDir);
  for (const auto& id : split.test_ids) {
    if (model.fingerprint().contains(id)) throw TrainingError("model was trained on test id '" + id + "'");
  }
  const auto view = test_view(corpus, labels, split);
  std::vector<std::string> texts, ids;
  std::vector<char> gold;
  for (std::size_t i = 0; i < view.posts.size(); ++i) {
    texts.push_back(view.posts[i]->text);
    ids.push_back(view.posts[i]->post_id);
    gold.push_back(view.labels[i].hidden ? 1 : 0);
  }
  const auto scores = predict_scores(model, texts);
  const auto records = classify(scores, c.threshold, ids);
  sink.write(artifact::kPredictions, predictions_to_tsv(records));

  const auto gold_flags = std::make_unique<bool[]>(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) gold_flags[i] = gold[i] != 0;
  const std::span<const bool> labels_span(gold_flags.get(), gold.size());
  const auto curve = roc_curve(scores, labels_span);
  sink.write(artifact::kRoc, roc_to_tsv(curve));

  const auto at = confusion_at(scores, labels_span, c.threshold);
  const auto youden = youden_point(curve);
  const auto at_youden = confusion_at(scores, labels_span, youden.threshold);
  KeyedRecord m;
  m.set_number("auc", curve.auc);
  m.set_number("auc_rank", auc_rank(scores, labels_span));
  m.set_number("test_posts", scores.size());
  m.set_number("test_hidden", at.positives());
  m.set_number("threshold", c.threshold);
  m.set_number("tp", at.tp);
  m.set_number("fp", at.fp);
  m.set_number("tn", at.tn);
  m.set_number("fn", at.fn);
  m.set_number("youden_threshold", youden.threshold);
  m.set_number("youden_tp", at_youden.tp);
  m.set_number("youden_fp", at_youden.fp);
  m.set_number("youden_tn", at_youden.tn);
  m.set_number("youden_fn", at_youden.fn);
  sink.write(artifact::kMetrics, m.to_block());
}

void do_mine(const PipelineConfig& c, ArtifactSink& sink) {
  const auto corpus = load_corpus(c);
  const auto labels = load_labels(c);
  const auto split = load_split(c, corpus);
  const auto predictions = predictions_from_tsv(read_file(c.out_dir / artifact::kPredictions));
  const auto view = test_view(corpus, labels, split);
  const auto tp_ids = true_positive_filter(view.labels, predictions);

  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& p : corpus) texts.push_back(p.text);
  const auto segmented = Segmenter(c.segmenter).segment_all(texts);
  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t i = 0; i < corpus.size(); ++i) position.emplace(corpus[i].post_id, i);

  auto rank = [&](const std::vector<Tokens>& hidden, const std::vector<Tokens>& other) {
    if (hidden.empty() || other.empty()) {
      ExpressionRanking empty;
      empty.requested = c.top_k;
      empty.shortfall = true;
      return empty;
    }
    return expression_ranking(hidden, other, c.top_k, c.min_hidden_count, c.rate_mode);
  };

  // Filtered: detector-confirmed hidden sentences vs the rest of the test pool.
  std::vector<Tokens> filtered_hidden, filtered_other;
  for (const auto* post : view.posts) {
    const auto& toks = segmented[position.at(post->post_id)];
    (tp_ids.count(post->post_id) ? filtered_hidden : filtered_other).push_back(toks);
  }
  const auto filtered = rank(filtered_hidden, filtered_other);

  // Unfiltered: gold labels only.
  std::vector<Tokens> gold_hidden, gold_other;
  if (c.unfiltered_pool == MiningPool::kTest) {
    for (std::size_t i = 0; i < view.posts.size(); ++i) {
      const auto& toks = segmented[position.at(view.posts[i]->post_id)];
      (view.labels[i].hidden ? gold_hidden : gold_other).push_back(toks);
    }
  } else {
    for (std::size_t i = 0; i < corpus.size(); ++i) (labels[i].hidden ? gold_hidden : gold_other).push_back(segmented[i]);
  }
  const auto unfiltered = rank(gold_hidden, gold_other);

  std::vector<std::string> words;
  for (const auto& s : filtered.top) words.push_back(s.token);
  const auto table = intensity_table(corpus, segmented, words, c.emotion);

  sink.write(artifact::kRankingFiltered, ranking_to_tsv(filtered));
  sink.write(artifact::kRankingUnfiltered, ranking_to_tsv(unfiltered));
  sink.write(artifact::kIntensity, intensity_to_tsv(table));
  std::string tp_text;
  for (const auto* post : view.posts) {
    if (tp_ids.count(post->post_id)) tp_text += post->post_id + '\n';
  }
  sink.write(artifact::kTruePositives, tp_text);

  KeyedRecord summary;
  summary.set_number("top_k", c.top_k);
  summary.set_number("min_hidden_count", c.min_hidden_count);
  summary.set("rate_mode", std::string(rate_mode_name(c.rate_mode)));
  summary.set_number("true_positives", tp_ids.size());
  summary.set_number("filtered_hidden", filtered_hidden.size());
  summary.set_number("filtered_other", filtered_other.size());
  summary.set_number("unfiltered_hidden", gold_hidden.size());
  summary.set_number("unfiltered_other", gold_other.size());
  summary.set("filtered_shortfall", filtered.shortfall ? "true" : "false");
  summary.set("unfiltered_shortfall", unfiltered.shortfall ? "true" : "false");
  sink.write(artifact::kMining, summary.to_block());
}

template <typename Fn>
void standalone(const char* name, const PipelineConfig& config, Fn&& fn) {
  config.validate();
  ArtifactSink sink(config.out_dir);
  run_stage(name, sink, [&] { fn(config, sink); });
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(gap_threshold > 0.0 && gap_threshold <= 3.0)) throw ConfigError("gap_threshold must lie in (0, 3]");
  if (!(strong_threshold > 0.0 && strong_threshold <= 3.0)) throw ConfigError("strong_threshold must lie in (0, 3]");
  if (ratio.train <= 0 || ratio.test <= 0) throw ConfigError("ratio components must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
  if (top_k == 0) throw ConfigError("top_k must be positive");
  if (out_dir.empty()) throw ConfigError("output directory is empty");
  segmenter.validate();
  detector.validate();
}

void PipelineConfig::apply(const KeyedRecord& record) {
  KeyedRecord detector_keys;
  KeyedRecord column_keys;
  bool has_columns = false;
  for (const auto& [key, value] : record.fields()) {
    if (key == "corpus") corpus_path = value;
    else if (key == "corpus_sha256") continue;
    else if (key == "emotion") emotion = emotion_from_name(value);
    else if (key == "gap_threshold") gap_threshold = record.get_double(key);
    else if (key == "strong_threshold") strong_threshold = record.get_double(key);
    else if (key == "ratio") ratio = parse_ratio(value);
    else if (key == "split_mode") split_mode = parse_split_mode(value);
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "segmenter.mode") segmenter.mode = parse_segment_mode(value);
    else if (key == "segmenter.ngram_n") segmenter.ngram_n = static_cast<int>(record.get_int(key));
    else if (key == "segmenter.normalizer") segmenter.normalizer = parse_normalizer(value);
    else if (key == "segmenter.adapter") segmenter.adapter = value;
    else if (key.starts_with("detector.")) detector_keys.set(key.substr(9), value);
    else if (key == "threshold") threshold = record.get_double(key);
    else if (key == "top_k") top_k = static_cast<std::size_t>(record.get_int(key));
    else if (key == "min_hidden_count") min_hidden_count = static_cast<std::size_t>(record.get_int(key));
    else if (key == "rate_mode") rate_mode = parse_rate_mode(value);
    else if (key == "mining_pool") {
      if (value == "test") unfiltered_pool = MiningPool::kTest;
      else if (value == "corpus") unfiltered_pool = MiningPool::kCorpus;
      else throw ConfigError("mining_pool must be test or corpus");
    } else if (key == "examples") example_count = static_cast<std::size_t>(record.get_int(key));
    else if (key == "out") out_dir = value;
    else if (key.starts_with("column.")) {
      column_keys.set(key.substr(7), value);
      has_columns = true;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (!detector_keys.fields().empty()) {
    // Merge over the current detector settings.
    auto merged = detector.to_record();
    for (const auto& [k, v] : detector_keys.fields()) merged.set(k, v);
    detector = DetectorConfig::from_record(merged);
  }
  if (has_columns) {
    auto merged = columns.to_record();
    // Prefix templates rebuild every emotion column, so they win over the
    // per-column values carried in the merged record.
    KeyedRecord base;
    for (const auto& [k, v] : column_keys.fields()) {
      if (k == "writer_prefix" || k == "reader_prefix") base.set(k, v);
    }
    if (base.fields().empty()) {
      for (const auto& [k, v] : column_keys.fields()) merged.set(k, v);
      columns = ColumnMapping::from_record(merged);
    } else {
      for (const auto& [k, v] : column_keys.fields()) base.set(k, v);
      if (!base.has("text")) base.set("text", columns.text_column);
      if (!base.has("id") && columns.id_column) base.set("id", *columns.id_column);
      if (!base.has("user") && columns.user_column) base.set("user", *columns.user_column);
      columns = ColumnMapping::from_record(base);
    }
  }
}

KeyedRecord PipelineConfig::to_record() const {
  KeyedRecord r;
  r.set("emotion", std::string(emotion_name(emotion)));
  r.set_number("gap_threshold", gap_threshold);
  r.set_number("strong_threshold", strong_threshold);
  r.set("ratio", ratio_text(ratio));
  r.set("split_mode", std::string(split_mode_name(split_mode)));
  r.set("seed", std::to_string(seed));
  r.set("segmenter.mode", std::string(segment_mode_name(segmenter.mode)));
  r.set_number("segmenter.ngram_n", segmenter.ngram_n);
  r.set("segmenter.normalizer", std::string(normalizer_name(segmenter.normalizer)));
  r.set("segmenter.adapter", segmenter.adapter);
  const auto detector_record = detector.to_record();
  for (const auto& [k, v] : detector_record.fields()) {
    if (k == "seed" || k.starts_with("segmenter.")) continue;  // derived from the run seed / segmenter
    r.set("detector." + k, v);
  }
  r.set_number("threshold", threshold);
  r.set_number("top_k", top_k);
  r.set_number("min_hidden_count", min_hidden_count);
  r.set("rate_mode", std::string(rate_mode_name(rate_mode)));
  r.set("mining_pool", unfiltered_pool == MiningPool::kTest ? "test" : "corpus");
  r.set_number("examples", example_count);
  const auto column_record = columns.to_record();
  for (const auto& [k, v] : column_record.fields()) r.set("column." + k, v);
  return r;
}

bool RunManifest::lists(std::string_view path) const {
  return std::any_of(artifacts.begin(), artifacts.end(), [&](const auto& a) { return a.first == path; });
}

std::string RunManifest::to_text() const {
  KeyedRecord r;
  for (const auto& [path, hash] : artifacts) r.set("artifact:" + path, hash);
  for (const auto& [k, v] : summary.fields()) r.set("summary:" + k, v);
  return r.to_block();
}

RunManifest RunManifest::parse(std::string_view text, std::filesystem::path out_dir) {
  RunManifest m;
  m.out_dir = std::move(out_dir);
  const auto record = KeyedRecord::from_block(text);
  for (const auto& [k, v] : record.fields()) {
    if (k.starts_with("artifact:")) m.artifacts.emplace_back(k.substr(9), v);
    else if (k.starts_with("summary:")) m.summary.set(k.substr(8), v);
  }
  return m;
}

RunManifest refresh_manifest(const std::filesystem::path& out_dir) {
  RunManifest m;
  m.out_dir = out_dir;
  for (const auto& rel : known_artifacts()) {
    if (std::filesystem::is_regular_file(out_dir / rel)) m.artifacts.emplace_back(rel, sha256_file(out_dir / rel));
  }
  auto absorb = [&](const char* file, const std::string& prefix) {
    if (!std::filesystem::exists(out_dir / file)) return;
    const auto record = read_block_file(out_dir / file);
    for (const auto& [k, v] : record.fields()) m.summary.set(prefix + k, v);
  };
  absorb(artifact::kMetrics, "eval.");
  absorb(artifact::kMining, "mine.");
  if (std::filesystem::exists(out_dir / artifact::kStrongCounts)) {
    const auto counts = read_block_file(out_dir / artifact::kStrongCounts);
    m.summary.set("stats.posts", counts.get("posts"));
    m.summary.set("stats.hidden", counts.get("hidden"));
  }
  write_file(out_dir / artifact::kManifest, m.to_text());
  return m;
}

RunManifest load_manifest(const std::filesystem::path& out_dir) {
  return RunManifest::parse(read_file(out_dir / artifact::kManifest), out_dir);
}

std::uint64_t split_seed(const PipelineConfig& config) { return stage_seed(config.seed, "split"); }
std::uint64_t train_seed(const PipelineConfig& config) { return stage_seed(config.seed, "train"); }

void stage_ingest(const PipelineConfig& config) { standalone("ingest", config, do_ingest); }
void stage_stats(const PipelineConfig& config) { standalone("stats", config, do_stats); }
void stage_split(const PipelineConfig& config) { standalone("split", config, do_split); }
void stage_train(const PipelineConfig& config) { standalone("train", config, do_train); }
void stage_evaluate(const PipelineConfig& config) { standalone("evaluate", config, do_evaluate); }
void stage_mine(const PipelineConfig& config) { standalone("mine", config, do_mine); }

RunManifest run_pipeline(const PipelineConfig& config) {
  try {
    config.validate();
  } catch (const Error& e) {
    throw StageError("config", e.what());
  }
  std::filesystem::create_directories(config.out_dir);
  ArtifactSink sink(config.out_dir);
  try {
    run_stage("ingest", sink, [&] { do_ingest(config, sink); });
    run_stage("stats", sink, [&] { do_stats(config, sink); });
    run_stage("split", sink, [&] { do_split(config, sink); });
    run_stage("train", sink, [&] { do_train(config, sink); });
    run_stage("evaluate", sink, [&] { do_evaluate(config, sink); });
    run_stage("mine", sink, [&] { do_mine(config, sink); });
    sink.track(artifact::kManifest);
    auto manifest = refresh_manifest(config.out_dir);
    sink.track("report");
    return emit_report(manifest);
  } catch (...) {
    sink.roll_back();
    throw;
  }
}

}  // namespace emogap
