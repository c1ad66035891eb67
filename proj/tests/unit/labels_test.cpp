#include <random>

#include "doctest.h"
#include "emogap/errors.hpp"
#include "emogap/labels.hpp"
#include "fixtures.hpp"

using namespace emogap;

TEST_CASE("thirds formatting and comparison") {
  CHECK(to_string(Thirds{8}) == "8/3");
  CHECK(to_string(Thirds{-3}) == "-1");
  CHECK(to_string(Thirds{0}) == "0");
  CHECK(Thirds{6}.at_least(2.0));
  CHECK_FALSE(Thirds{5}.at_least(2.0));
  CHECK(Thirds::whole(2) == Thirds{6});
}

TEST_CASE("worked examples") {
  const Corpus corpus = {
      fixtures::post("a", "x", 3, {0, 1, 0}),  // avg 1/3, gap 8/3
      fixtures::post("b", "x", 2, {0, 0, 0}),  // gap exactly 2
      fixtures::post("c", "x", 2, {1, 0, 0}),  // gap 5/3
      fixtures::post("d", "x", 0, {3, 3, 3}),
  };
  const auto labels = derive_hidden_labels(corpus, Emotion::kAnger, 2.0);
  REQUIRE(labels.size() == 4);
  CHECK(labels[0].reader_avg == Thirds{1});
  CHECK(labels[0].gap == Thirds{8});
  CHECK(labels[0].hidden);
  CHECK(labels[1].hidden);
  CHECK_FALSE(labels[2].hidden);
  CHECK_FALSE(labels[3].hidden);
  CHECK(labels[3].gap == Thirds{-9});

  const auto reversed = derive_hidden_labels(corpus, Emotion::kAnger, 2.0, GapDirection::kReaderAbove);
  CHECK_FALSE(reversed[0].hidden);
  CHECK(reversed[3].hidden);
}

TEST_CASE("oracle: all 256 intensity combinations at threshold 2") {
  int hidden = 0;
  for (int w = 0; w <= 3; ++w) {
    for (int r1 = 0; r1 <= 3; ++r1) {
      for (int r2 = 0; r2 <= 3; ++r2) {
        for (int r3 = 0; r3 <= 3; ++r3) {
          const Corpus c = {fixtures::post("p", "x", w, {r1, r2, r3})};
          const auto label = derive_hidden_labels(c, Emotion::kAnger, 2.0).front();
          const bool expected = 3 * w - (r1 + r2 + r3) >= 6;
          CHECK(label.hidden == expected);
          CHECK(label.gap.numerator == 3 * w - (r1 + r2 + r3));
          hidden += expected;
        }
      }
    }
  }
  // w=2: reader sum 0 (1 way); w=3: reader sum <= 3 (20 ways).
  CHECK(hidden == 21);
}

TEST_CASE("oracle: hidden count is monotone in the threshold") {
  std::mt19937_64 gen(77);
  const auto corpus = fixtures::random_corpus(gen, 500);
  std::size_t previous = corpus.size() + 1;
  for (double t : {1.0 / 3.0, 2.0 / 3.0, 1.0, 4.0 / 3.0, 5.0 / 3.0, 2.0, 7.0 / 3.0, 8.0 / 3.0, 3.0}) {
    std::size_t n = 0;
    for (const auto& l : derive_hidden_labels(corpus, Emotion::kJoy, t)) n += l.hidden;
    CHECK(n <= previous);
    previous = n;
  }
}

TEST_CASE("threshold outside (0, 3] is rejected") {
  const Corpus corpus = {fixtures::post("a", "x", 3, {0, 0, 0})};
  CHECK_THROWS_AS(derive_hidden_labels(corpus, Emotion::kAnger, 0.0), ArgumentError);
  CHECK_THROWS_AS(derive_hidden_labels(corpus, Emotion::kAnger, 3.5), ArgumentError);
  CHECK_NOTHROW(derive_hidden_labels(corpus, Emotion::kAnger, 3.0));
}

TEST_CASE("oracle: co-occurrence matches a brute-force double loop") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto corpus = fixtures::random_corpus(gen, 1 + gen() % 200);
    for (auto source : {LabelSource::kWriter, LabelSource::kReaderAverage}) {
      const auto m = cooccurrence_matrix(corpus, source, 2.0);
      for (std::size_t a = 0; a < kEmotionCount; ++a) {
        for (std::size_t b = 0; b < kEmotionCount; ++b) {
          long long expected = 0;
          for (const auto& p : corpus) {
            auto strong = [&](std::size_t e) {
              if (source == LabelSource::kWriter) return p.writer.intensities[e] >= 2;
              int sum = 0;
              for (const auto& r : p.readers) sum += r.intensities[e];
              return sum >= 6;
            };
            expected += strong(a) && strong(b);
          }
          CHECK(m.counts[a][b] == expected);
          CHECK(m.counts[a][b] == m.counts[b][a]);
        }
      }
    }
  }
}

TEST_CASE("co-occurrence diagonal equals strong-label counts") {
  std::mt19937_64 gen(8);
  const auto corpus = fixtures::random_corpus(gen, 300);
  const auto w = cooccurrence_matrix(corpus, LabelSource::kWriter);
  const auto r = cooccurrence_matrix(corpus, LabelSource::kReaderAverage);
  for (auto e : kAllEmotions) {
    const auto counts = strong_label_counts(corpus, e);
    CHECK(w.at(e, e) == counts.writer_count);
    CHECK(r.at(e, e) == counts.reader_count);
  }
}

TEST_CASE("reader count modes") {
  const Corpus corpus = {
      fixtures::post("a", "x", 2, {2, 0, 0}),  // one reader strong, avg 2/3
      fixtures::post("b", "x", 3, {2, 2, 1}),  // two strong, avg 5/3
      fixtures::post("c", "x", 0, {3, 3, 0}),  // two strong, avg 2
      fixtures::post("d", "x", 1, {2, 2, 2}),  // three strong, avg 2
  };
  auto count = [&](ReaderCountMode m) { return strong_label_counts(corpus, Emotion::kAnger, 2.0, m); };
  CHECK(count(ReaderCountMode::kAverage).writer_count == 2);
  CHECK(count(ReaderCountMode::kAverage).reader_count == 2);
  CHECK(count(ReaderCountMode::kAnyReader).reader_count == 4);
  CHECK(count(ReaderCountMode::kMajority).reader_count == 3);
  CHECK(count(ReaderCountMode::kLabelTotal).reader_count == 8);
  for (auto m : kAllReaderCountModes) CHECK(parse_reader_count_mode(reader_count_mode_name(m)) == m);
}

TEST_CASE("label and matrix TSV round trips") {
  std::mt19937_64 gen(4);
  const auto corpus = fixtures::random_corpus(gen, 80);
  const auto labels = derive_hidden_labels(corpus, Emotion::kSurprise, 4.0 / 3.0);
  const auto back = labels_from_tsv(labels_to_tsv(labels));
  REQUIRE(back.size() == labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(back[i].post_id == labels[i].post_id);
    CHECK(back[i].emotion == labels[i].emotion);
    CHECK(back[i].writer_intensity == labels[i].writer_intensity);
    CHECK(back[i].reader_avg == labels[i].reader_avg);
    CHECK(back[i].gap == labels[i].gap);
    CHECK(back[i].hidden == labels[i].hidden);
  }
  const auto m = cooccurrence_matrix(corpus, LabelSource::kReaderAverage);
  CHECK(matrix_from_tsv(matrix_to_tsv(m), m.source, m.strong_threshold).counts == m.counts);
}
