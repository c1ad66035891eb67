#pragma once

// Test-only corpus helpers built on std::mt19937_64.

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "emogap/corpus.hpp"

namespace fixtures {

inline emogap::AnnotatedPost post(std::string id, std::string text, int writer_anger,
                                  std::array<int, 3> reader_anger) {
  emogap::AnnotatedPost p;
  p.post_id = std::move(id);
  p.text = std::move(text);
  p.writer[emogap::Emotion::kAnger] = writer_anger;
  p.readers.resize(3);
  for (std::size_t r = 0; r < 3; ++r) p.readers[r][emogap::Emotion::kAnger] = reader_anger[r];
  return p;
}

inline emogap::Corpus random_corpus(std::mt19937_64& gen, std::size_t n) {
  emogap::Corpus corpus;
  for (std::size_t i = 0; i < n; ++i) {
    emogap::AnnotatedPost p;
    p.post_id = std::to_string(i);
    p.text = "t" + std::to_string(gen() % 1000) + " x";
    p.readers.resize(3);
    for (std::size_t e = 0; e < emogap::kEmotionCount; ++e) {
      p.writer.intensities[e] = static_cast<int>(gen() % 4);
      for (auto& r : p.readers) r.intensities[e] = static_cast<int>(gen() % 4);
    }
    corpus.push_back(std::move(p));
  }
  return corpus;
}

inline emogap::Corpus id_corpus(std::size_t n) {
  emogap::Corpus corpus(n);
  for (std::size_t i = 0; i < n; ++i) {
    corpus[i].post_id = std::to_string(i);
    corpus[i].text = "x";
    corpus[i].readers.resize(3);
  }
  return corpus;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
#ifdef EMOGAP_TEST_TMP
  std::filesystem::path root = EMOGAP_TEST_TMP;
#else
  std::filesystem::path root = std::filesystem::temp_directory_path() / "emogap-tests";
#endif
  auto dir = root / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
