#include <algorithm>
#include <set>

#include "doctest.h"
#include "emogap/errors.hpp"
#include "emogap/hashing.hpp"
#include "emogap/keyed_text.hpp"
#include "emogap/pipeline.hpp"
#include "emogap/svg.hpp"
#include "emogap/synthetic.hpp"
#include "fixtures.hpp"

using namespace emogap;
namespace fs = std::filesystem;

namespace {

struct PlantedRun {
  PlantedCorpus planted;
  PipelineConfig config;
};

PlantedRun planted_config(const std::string& name, std::size_t posts = 2000) {
  PlantedRun run;
  PlantedCorpusSpec spec;
  spec.posts = posts;
  spec.seed = 21;
  run.planted = generate_planted_corpus(spec);
  const auto dir = fixtures::scratch_dir(name);
  write_file(dir / "corpus.tsv", to_tsv(run.planted.corpus, ColumnMapping::defaults()));
  run.config.corpus_path = dir / "corpus.tsv";
  run.config.out_dir = dir / "out";
  run.config.seed = 4;
  return run;
}

std::size_t artifact_count(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

}  // namespace

TEST_CASE("planted corpus has gap-consistent labels") {
  PlantedCorpusSpec spec;
  spec.posts = 1000;
  const auto planted = generate_planted_corpus(spec);
  const auto labels = derive_hidden_labels(planted.corpus, Emotion::kAnger);
  std::size_t hidden = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(labels[i].hidden == planted.hidden[i]);
    hidden += labels[i].hidden;
  }
  CHECK(hidden == 100);
  CHECK(planted.markers.size() == 10);
}

TEST_CASE("end-to-end planted run") {
  auto run = planted_config("pipeline_planted");
  const auto manifest = run_pipeline(run.config);

  CHECK(std::stod(manifest.summary.get("eval.auc")) >= 0.9);
  CHECK(std::stod(manifest.summary.get("eval.auc")) ==
        doctest::Approx(std::stod(manifest.summary.get("eval.auc_rank"))).epsilon(1e-9));
  CHECK(manifest.summary.get("stats.posts") == "2000");
  for (const char* a : {artifact::kCorpus, artifact::kLabels, artifact::kSplit, artifact::kPredictions,
                        artifact::kRoc, artifact::kRankingFiltered, artifact::kHeatmapWriter, artifact::kRocSvg,
                        artifact::kRankingFilteredSvg, artifact::kExamples, artifact::kIntensityReport}) {
    CHECK_MESSAGE(manifest.lists(a), a);
  }
  for (const auto& [path, hash] : manifest.artifacts) CHECK(sha256_file(run.config.out_dir / path) == hash);

  const auto filtered = ranking_from_tsv(read_file(run.config.out_dir / artifact::kRankingFiltered), 10);
  const std::set<std::string> markers(run.planted.markers.begin(), run.planted.markers.end());
  std::size_t recovered = 0;
  for (const auto& s : filtered.top) recovered += markers.count(s.token);
  CHECK(recovered >= 8);

  // Top bar of the chart is the highest-diff token.
  const auto svg = read_file(run.config.out_dir / artifact::kRankingFilteredSvg);
  const auto first = svg.find(filtered.top.front().token);
  REQUIRE(first != std::string::npos);
  for (std::size_t i = 1; i < filtered.top.size(); ++i) CHECK(svg.find(filtered.top[i].token) > first);

  const auto mining = read_block_file(run.config.out_dir / artifact::kMining);
  CHECK(mining.get_int("filtered_hidden") <= mining.get_int("unfiltered_hidden"));
}

TEST_CASE("filtered hidden set is a subset of the gold hidden set") {
  auto run = planted_config("pipeline_subset", 1000);
  run_pipeline(run.config);
  const auto labels = labels_from_tsv(read_file(run.config.out_dir / artifact::kLabels));
  std::set<std::string> gold;
  for (const auto& l : labels) {
    if (l.hidden) gold.insert(l.post_id);
  }
  const auto tp = read_file(run.config.out_dir / artifact::kTruePositives);
  std::size_t start = 0;
  while (start < tp.size()) {
    const auto nl = tp.find('\n', start);
    CHECK(gold.count(tp.substr(start, nl - start)) == 1);
    start = nl + 1;
  }
}

TEST_CASE("identical config and seed give identical manifests") {
  auto a = planted_config("pipeline_det_a", 1000);
  auto b = planted_config("pipeline_det_b", 1000);
  const auto ma = run_pipeline(a.config);
  const auto mb = run_pipeline(b.config);
  CHECK(ma.artifacts == mb.artifacts);
  CHECK(read_file(a.config.out_dir / artifact::kManifest) == read_file(b.config.out_dir / artifact::kManifest));

  b.config.seed = 5;
  fs::remove_all(b.config.out_dir);
  CHECK(run_pipeline(b.config).artifacts != ma.artifacts);
}

TEST_CASE("stage-by-stage execution matches the full run") {
  auto full = planted_config("pipeline_full", 800);
  auto staged = planted_config("pipeline_staged", 800);
  run_pipeline(full.config);
  stage_ingest(staged.config);
  stage_stats(staged.config);
  stage_split(staged.config);
  stage_train(staged.config);
  stage_evaluate(staged.config);
  stage_mine(staged.config);
  emit_report(refresh_manifest(staged.config.out_dir));
  for (const char* a : {artifact::kPredictions, artifact::kRankingFiltered, artifact::kMetrics}) {
    CHECK(read_file(full.config.out_dir / a) == read_file(staged.config.out_dir / a));
  }
}

TEST_CASE("a failing stage names itself and removes its artifacts") {
  const auto dir = fixtures::scratch_dir("pipeline_fail");
  // All posts non-hidden: training sees a single class.
  Corpus corpus;
  for (int i = 0; i < 50; ++i) corpus.push_back(fixtures::post(std::to_string(i), "a b c", 0, {0, 0, 0}));
  write_file(dir / "corpus.tsv", to_tsv(corpus, ColumnMapping::defaults()));
  PipelineConfig c;
  c.corpus_path = dir / "corpus.tsv";
  c.out_dir = dir / "out";
  try {
    run_pipeline(c);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "train");
    CHECK(std::string(e.what()).rfind("[train]", 0) == 0);
  }
  CHECK(artifact_count(c.out_dir) == 0);
}

TEST_CASE("malformed corpus fails in ingest") {
  const auto dir = fixtures::scratch_dir("pipeline_bad_corpus");
  write_file(dir / "corpus.tsv", "Sentence\tWriter_Joy\nhello\t1\n");
  PipelineConfig c;
  c.corpus_path = dir / "corpus.tsv";
  c.out_dir = dir / "out";
  try {
    run_pipeline(c);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "ingest");
  }
  CHECK(artifact_count(c.out_dir) == 0);
}

TEST_CASE("stage run out of order reports the missing input") {
  const auto dir = fixtures::scratch_dir("pipeline_order");
  PipelineConfig c;
  c.out_dir = dir;
  CHECK_THROWS_AS(stage_train(c), StageError);
  CHECK(artifact_count(dir) == 0);
}

TEST_CASE("report: missing artifact is named") {
  auto run = planted_config("pipeline_report_missing", 600);
  auto manifest = run_pipeline(run.config);
  fs::remove(run.config.out_dir / artifact::kRoc);
  try {
    emit_report(manifest);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "report");
    CHECK(std::string(e.what()).find("roc.tsv") != std::string::npos);
  }
}

TEST_CASE("report: empty mining result renders a shortfall notice") {
  auto run = planted_config("pipeline_report_empty", 600);
  run.config.min_hidden_count = 100000;
  const auto manifest = run_pipeline(run.config);
  CHECK(manifest.summary.get("mine.filtered_shortfall") == "true");
  const auto svg = read_file(run.config.out_dir / artifact::kRankingFilteredSvg);
  CHECK(svg.find("shortfall") != std::string::npos);
  CHECK(svg.rfind("<svg", 0) == 0);
}

TEST_CASE("report: all-zero heatmap renders") {
  const std::vector<std::string> labels = {"a", "b"};
  const std::vector<std::vector<long long>> zeros(2, std::vector<long long>(2, 0));
  const auto svg = svg::heatmap("zeros", labels, zeros);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg::escape_xml("<a&b>") == "&lt;a&amp;b&gt;");
}

TEST_CASE("config record round trip") {
  PipelineConfig c;
  c.emotion = Emotion::kTrust;
  c.gap_threshold = 4.0 / 3.0;
  c.ratio = {9, 1};
  c.top_k = 7;
  c.segmenter.mode = SegmentMode::kCharNgram;
  PipelineConfig d;
  d.apply(KeyedRecord::from_block(c.to_record().to_block()));
  CHECK(d.to_record().fields() == c.to_record().fields());

  KeyedRecord bad;
  bad.set("gap_threshold", "4");
  d.apply(bad);
  CHECK_THROWS_AS(d.validate(), ConfigError);
}
