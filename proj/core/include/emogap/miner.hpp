#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "emogap/corpus.hpp"
#include "emogap/detector.hpp"
#include "emogap/labels.hpp"
#include "emogap/segmenter.hpp"

namespace emogap {

// How a token's frequency within a sentence set is measured.
enum class RateMode {
  kPresence,    // share of sentences containing the token (default)
  kTokenShare,  // token occurrences / all tokens in the set
};

std::string_view rate_mode_name(RateMode mode) noexcept;
RateMode parse_rate_mode(std::string_view name);

struct ExpressionScore {
  std::string token;
  double rate_hidden = 0.0;
  double rate_other = 0.0;
  double diff = 0.0;
  std::size_t hidden_count = 0;  // hidden sentences containing the token
};

struct ExpressionRanking {
  std::vector<ExpressionScore> top;  // descending by diff
  std::size_t requested = 0;
  bool shortfall = false;            // fewer than `requested` tokens qualified
};

// Ids that are gold hidden and predicted positive. Throws ArgumentError
// unless labels and predictions cover the same ids.
std::set<std::string> true_positive_filter(std::span<const HiddenLabel> labels,
                                           std::span<const PredictionRecord> predictions);

// Share of sentences containing token at least once. ArgumentError on an
// empty set.
double doc_rate(std::string_view token, std::span<const Tokens> sentences);

// Ranked by diff desc, then rate_hidden desc, then token. Ordering uses
// exact integer cross-products, so ties are exact ties.
ExpressionRanking expression_ranking(std::span<const Tokens> hidden, std::span<const Tokens> other,
                                     std::size_t k = 10, std::size_t min_hidden_count = 5,
                                     RateMode mode = RateMode::kPresence);

struct IntensityRow {
  std::string token;
  bool present = true;  // false: token never occurs, means undefined
  std::size_t sentences = 0;
  double writer_mean = 0.0;
  std::array<double, kReaderCount> reader_means{};
  double writer_minus_avg_reader = 0.0;
};

// |writer_mean - mean(reader_means) - writer_minus_avg_reader| <= tolerance.
bool intensity_row_consistent(const IntensityRow& row, double tolerance);

// One row per token (means over sentences containing it), then an
// "All sentences" row over the whole corpus. `segmented` is aligned with
// `corpus`.
std::vector<IntensityRow> intensity_table(std::span<const AnnotatedPost> corpus,
                                          std::span<const Tokens> segmented,
                                          std::span<const std::string> tokens,
                                          Emotion emotion = Emotion::kAnger);

inline constexpr std::string_view kAllSentencesRow = "All sentences";

// token, rate_hidden, rate_other, diff, hidden_count
std::string ranking_to_tsv(const ExpressionRanking& ranking);
ExpressionRanking ranking_from_tsv(std::string_view tsv, std::size_t requested);

// Word, Writer, Reader1..3, Writer - Avg. Reader, Sentences ("NA" when absent)
std::string intensity_to_tsv(std::span<const IntensityRow> rows);
std::vector<IntensityRow> intensity_from_tsv(std::string_view tsv);

}  // namespace emogap
