#include <cstdlib>

#include "doctest.h"
#include "emogap/detector.hpp"
#include "emogap/errors.hpp"
#include "emogap/keyed_text.hpp"
#include "fixtures.hpp"

using namespace emogap;
namespace fs = std::filesystem;

namespace {

constexpr const char* kMakeCheckpoint = R"PY(
import sys
from transformers import BertConfig, BertForSequenceClassification, BertTokenizer
out = sys.argv[1]
words = ["secret", "plain"] + ["f%d" % i for i in range(30)]
vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + words
with open(out + "/vocab.txt", "w") as f:
    f.write("\n".join(vocab) + "\n")
cfg = BertConfig(vocab_size=len(vocab), hidden_size=32, num_hidden_layers=1, num_attention_heads=2,
                 intermediate_size=64, max_position_embeddings=64, num_labels=2)
BertForSequenceClassification(cfg).save_pretrained(out)
BertTokenizer(out + "/vocab.txt").save_pretrained(out)
)PY";

bool torch_available() {
  return std::system("python3 -c 'import torch, transformers' > /dev/null 2>&1") == 0;
}

fs::path tiny_checkpoint() {
  const auto dir = fixtures::scratch_dir("encoder_ckpt");
  write_file(dir / "make.py", kMakeCheckpoint);
  const std::string cmd = "python3 '" + (dir / "make.py").string() + "' '" + dir.string() + "' > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  return dir;
}

std::vector<TrainingExample> examples(std::size_t n) {
  std::vector<TrainingExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool hidden = i % 3 == 0;
    out.push_back({"e" + std::to_string(i),
                   std::string(hidden ? "secret" : "plain") + " f" + std::to_string(i % 30), hidden});
  }
  return out;
}

}  // namespace

TEST_CASE("encoder backend trains, saves, loads and scores") {
  if (!torch_available()) {
    MESSAGE("python torch/transformers unavailable; skipping");
    return;
  }
  DetectorConfig c;
  c.backend = DetectorBackend::kEncoder;
  c.encoder_checkpoint = tiny_checkpoint().string();
  c.learning_rate = 1e-3;
  c.batch_size = 8;
  c.epochs = 3;
  c.max_length = 16;
  c.seed = 3;
  const auto model = train(c, examples(60));
  CHECK(model.backend() == DetectorBackend::kEncoder);

  const std::vector<std::string> probe = {"secret f1", "plain f1", "plain f2 with\ttab"};
  const auto scores = predict_scores(model, probe);
  REQUIRE(scores.size() == 3);
  for (double s : scores) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
  CHECK(scores[0] > scores[1]);

  const auto dir = fixtures::scratch_dir("encoder_saved");
  save_detector(model, dir / "model");
  const auto loaded = load_detector(dir / "model");
  CHECK(predict_scores(loaded, probe) == scores);

  // Tampering with a weight file breaks the recorded hash.
  for (const auto& e : fs::recursive_directory_iterator(dir / "model")) {
    if (e.is_regular_file() && e.path().filename() == "config.json") {
      write_file(e.path(), read_file(e.path()) + " ");
    }
  }
  CHECK_THROWS_AS(load_detector(dir / "model"), IntegrityError);
}

TEST_CASE("missing runner script is a config error") {
  DetectorConfig c;
  c.backend = DetectorBackend::kEncoder;
  c.encoder_checkpoint = fixtures::scratch_dir("encoder_dummy").string();
  c.encoder_runner = "/nonexistent/runner.py";
  CHECK_THROWS(train(c, examples(10)));
}
