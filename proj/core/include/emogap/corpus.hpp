#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emogap/emotion.hpp"
#include "emogap/keyed_text.hpp"

namespace emogap {

inline constexpr std::size_t kReaderCount = 3;

struct AnnotatedPost {
  std::string post_id;
  std::string text;
  EmotionVector writer;
  std::vector<EmotionVector> readers;  // exactly kReaderCount when valid
  std::string user_id;                 // empty unless a user column is mapped

  bool operator==(const AnnotatedPost&) const = default;
};

using Corpus = std::vector<AnnotatedPost>;

// Header names for the 34 logical fields. Defaults follow the
// Sentence / Writer_<Emotion> / Reader{1,2,3}_<Emotion> convention.
struct ColumnMapping {
  std::string text_column = "Sentence";
  std::optional<std::string> id_column;
  std::optional<std::string> user_column;
  std::array<std::string, kEmotionCount> writer_columns;
  std::array<std::array<std::string, kEmotionCount>, kReaderCount> reader_columns;

  static ColumnMapping defaults();

  // Keys: text, id, user, writer.<emotion>, reader<k>.<emotion>, and the
  // templates writer_prefix / reader_prefix ("Reader{k}_") which rebuild
  // every emotion column as prefix + Emotion. Unknown keys are rejected.
  static ColumnMapping from_record(const KeyedRecord& record);
  KeyedRecord to_record() const;
};

// Reads a UTF-8 TSV with a header row. Throws SchemaError / RowError.
Corpus parse_corpus(const std::filesystem::path& path, const ColumnMapping& mapping);
Corpus parse_corpus_text(std::string_view tsv, const ColumnMapping& mapping);

// Inverse of parse_corpus for the default mapping (used for fixtures and
// round-trip checks).
std::string to_tsv(std::span<const AnnotatedPost> corpus, const ColumnMapping& mapping);

struct Violation {
  std::string field;
  std::string rule;
};

// Empty iff every type invariant holds.
std::vector<Violation> validate_post(const AnnotatedPost& post);

// Normalized corpus: one single-line keyed record per post.
std::string serialize_corpus(std::span<const AnnotatedPost> corpus);
Corpus deserialize_corpus(std::string_view text);

enum class SplitMode {
  kRandom,      // unstratified, per post
  kStratified,  // class proportions preserved per label
  kGrouped,     // all posts of a user land on one side
};

std::string_view split_mode_name(SplitMode mode) noexcept;
SplitMode parse_split_mode(std::string_view name);

struct SplitRatio {
  int train = 4;
  int test = 1;
};

struct DatasetSplit {
  std::set<std::string> train_ids;
  std::set<std::string> test_ids;
  std::uint64_t seed = 0;
  SplitRatio ratio;
  SplitMode mode = SplitMode::kRandom;
};

struct SplitOptions {
  SplitMode mode = SplitMode::kRandom;
  // Required for kStratified: one label per post in corpus order.
  std::span<const bool> strata;
};

// |train| = floor(n * train / (train + test)); remainder to test.
DatasetSplit split_dataset(std::span<const AnnotatedPost> corpus, SplitRatio ratio,
                           std::uint64_t seed, const SplitOptions& options = {});

// Keyed block with seed, ratio, mode, counts and the test ids.
KeyedRecord split_to_record(const DatasetSplit& split);
// Rebuilds the split given the corpus (train = corpus ids minus test ids).
DatasetSplit split_from_record(const KeyedRecord& record, std::span<const AnnotatedPost> corpus);

}  // namespace emogap
