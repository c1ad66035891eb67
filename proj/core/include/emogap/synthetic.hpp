#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "emogap/corpus.hpp"

namespace emogap {

// Synthetic corpus with known ground truth: a fixed share of posts are
// hidden (writer exceeds the reader mean by >= 2 for the chosen emotion)
// and a set of marker tokens is planted at different rates in hidden and
// non-hidden posts. Texts are space-separated tokens.
struct PlantedCorpusSpec {
  std::size_t posts = 5000;
  double hidden_fraction = 0.1;
  std::size_t markers = 10;
  double marker_rate_hidden = 0.4;
  double marker_rate_other = 0.05;
  std::size_t filler_vocabulary = 400;
  std::size_t min_filler = 5;
  std::size_t max_filler = 12;
  Emotion emotion = Emotion::kAnger;
  std::uint64_t seed = 1;
};

struct PlantedCorpus {
  Corpus corpus;
  std::vector<std::string> markers;
  std::vector<bool> hidden;  // aligned with corpus
};

PlantedCorpus generate_planted_corpus(const PlantedCorpusSpec& spec);

}  // namespace emogap
