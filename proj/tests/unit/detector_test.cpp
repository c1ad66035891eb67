#include <random>

#include "doctest.h"
#include "emogap/detector.hpp"
#include "emogap/errors.hpp"
#include "emogap/keyed_text.hpp"
#include "fixtures.hpp"

using namespace emogap;

namespace {

std::vector<TrainingExample> toy_examples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<TrainingExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool hidden = i % 4 == 0;
    std::string text = hidden ? "secret" : "plain";
    for (int j = 0; j < 5; ++j) text += " f" + std::to_string(gen() % 30);
    out.push_back({"p" + std::to_string(i), text, hidden});
  }
  return out;
}

std::vector<std::string> texts_of(const std::vector<TrainingExample>& ex) {
  std::vector<std::string> t;
  for (const auto& e : ex) t.push_back(e.text);
  return t;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  DetectorConfig c;
  CHECK(c.batch_size == 32);
  CHECK(c.dropout_rate == 0.1);
  CHECK(c.learning_rate == 2e-5);
  CHECK(c.epochs == 3);
  CHECK_FALSE(c.class_weighting);
  CHECK_NOTHROW(c.validate());

  auto bad = c;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.dropout_rate = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.learning_rate = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config record round trip") {
  DetectorConfig c;
  c.backend = DetectorBackend::kEncoder;
  c.encoder_checkpoint = "cl-tohoku/bert-base-japanese";
  c.seed = 12345678901234ULL;
  c.segmenter.mode = SegmentMode::kCharNgram;
  c.segmenter.ngram_n = 3;
  const auto back = DetectorConfig::from_record(KeyedRecord::from_block(c.to_record().to_block()));
  CHECK(back.to_record().fields() == c.to_record().fields());
  CHECK(back.seed == c.seed);
  CHECK(back.segmenter.ngram_n == 3);
}

TEST_CASE("baseline learns a planted marker") {
  const auto train_set = toy_examples(400, 1);
  DetectorConfig c;
  c.seed = 5;
  const auto model = train(c, train_set);
  const std::vector<std::string> probe = {"secret f1 f2", "plain f1 f2"};
  const auto s = predict_scores(model, probe);
  CHECK(s[0] > 0.5);
  CHECK(s[1] < 0.5);
  for (double v : predict_scores(model, texts_of(toy_examples(50, 2)))) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("training is deterministic for a fixed seed") {
  const auto ex = toy_examples(200, 3);
  DetectorConfig c;
  c.seed = 42;
  const auto a = train(c, ex);
  const auto b = train(c, ex);
  CHECK(a.blob() == b.blob());
  c.seed = 43;
  CHECK(train(c, ex).blob() != a.blob());
}

TEST_CASE("single-class training data is rejected") {
  auto ex = toy_examples(20, 4);
  for (auto& e : ex) e.hidden = false;
  CHECK_THROWS_AS(train(DetectorConfig{}, ex), TrainingError);
  CHECK_THROWS_AS(train(DetectorConfig{}, std::span<const TrainingExample>{}), TrainingError);
}

TEST_CASE("encoder backend without checkpoint is a config error") {
  DetectorConfig c;
  c.backend = DetectorBackend::kEncoder;
  CHECK_THROWS_AS(train(c, toy_examples(20, 5)), ConfigError);
  c.encoder_checkpoint = "/nonexistent/checkpoint";
  CHECK_THROWS_AS(train(c, toy_examples(20, 5)), ConfigError);
}

TEST_CASE("fingerprint") {
  const auto ex = toy_examples(30, 6);
  const auto fp = TrainingFingerprint::of(ex);
  CHECK(fp.post_ids.size() == 30);
  CHECK(std::is_sorted(fp.post_ids.begin(), fp.post_ids.end()));
  CHECK(fp.contains("p7"));
  CHECK_FALSE(fp.contains("q7"));
  CHECK(fp.sha256.size() == 64);
}

TEST_CASE("save and load reproduce scores bit for bit") {
  const auto ex = toy_examples(150, 7);
  DetectorConfig c;
  c.seed = 9;
  const auto model = train(c, ex);
  const auto dir = fixtures::scratch_dir("detector_save");
  save_detector(model, dir / "model");
  const auto loaded = load_detector(dir / "model");
  const auto probe = texts_of(toy_examples(40, 8));
  CHECK(predict_scores(loaded, probe) == predict_scores(model, probe));
  CHECK(loaded.fingerprint().post_ids == model.fingerprint().post_ids);
}

TEST_CASE("corrupt blob is an integrity error") {
  const auto model = train(DetectorConfig{}, toy_examples(100, 10));
  const auto dir = fixtures::scratch_dir("detector_corrupt");
  save_detector(model, dir);
  auto blob = read_file(dir / "params.blob");
  const auto pos = blob.find("bias=") + 5;
  blob[pos] = blob[pos] == '1' ? '0' : '1';
  write_file(dir / "params.blob", blob);
  CHECK_THROWS_AS(load_detector(dir), IntegrityError);

  write_file(dir / "params.blob", "garbage");
  CHECK_THROWS_AS(load_detector(dir), IntegrityError);
}

TEST_CASE("baseline blob encode/decode") {
  const auto m = detail::fit_baseline(DetectorConfig{}, toy_examples(100, 11));
  const auto back = detail::decode_baseline(detail::encode_baseline(m));
  CHECK(back.weights == m.weights);
  CHECK(back.bias == m.bias);
  CHECK(back.vocabulary.tokens == m.vocabulary.tokens);
}

TEST_CASE("classify uses score >= threshold") {
  const std::vector<double> s = {0.5, 0.4999, 0.9};
  const auto r = classify(s);
  CHECK(r[0].decision);
  CHECK_FALSE(r[1].decision);
  CHECK(r[0].post_id == "0");
  const std::vector<std::string> ids = {"a", "b", "c"};
  CHECK(classify(s, 0.95, ids)[2].post_id == "c");
  CHECK_FALSE(classify(s, 0.95, ids)[2].decision);
  CHECK_THROWS_AS(classify(s, 0.0), ArgumentError);
  CHECK_THROWS_AS(classify(s, 1.0), ArgumentError);
}

TEST_CASE("prediction TSV round trip is exact") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> s(100);
  for (auto& v : s) v = u(gen);
  const auto r = classify(s);
  const auto back = predictions_from_tsv(predictions_to_tsv(r));
  REQUIRE(back.size() == r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(back[i].post_id == r[i].post_id);
    CHECK(back[i].score == r[i].score);
    CHECK(back[i].decision == r[i].decision);
  }
}
