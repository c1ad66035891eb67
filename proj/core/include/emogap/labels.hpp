#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "emogap/corpus.hpp"
#include "emogap/emotion.hpp"

namespace emogap {

// Exact value n/3. Reader averages and writer-reader gaps are always
// multiples of 1/3, so they are kept as integer numerators.
struct Thirds {
  int numerator = 0;

  static constexpr Thirds whole(int v) noexcept { return {3 * v}; }
  double value() const noexcept { return numerator / 3.0; }
  // True iff n/3 >= threshold, without rounding n/3.
  bool at_least(double threshold) const noexcept { return numerator >= 3.0 * threshold; }

  friend constexpr Thirds operator-(Thirds a, Thirds b) noexcept { return {a.numerator - b.numerator}; }
  friend constexpr auto operator<=>(Thirds, Thirds) noexcept = default;
};

// "8/3", "-1", "0"
std::string to_string(Thirds t);

struct HiddenLabel {
  std::string post_id;
  Emotion emotion = Emotion::kAnger;
  int writer_intensity = 0;
  Thirds reader_avg;
  Thirds gap;
  bool hidden = false;
};

// Which side of the gap counts as hidden.
enum class GapDirection {
  kWriterAbove,  // writer exceeds readers (default)
  kReaderAbove,  // readers exceed the writer
};

Thirds reader_average(const AnnotatedPost& post, Emotion emotion);
Thirds hidden_gap(const AnnotatedPost& post, Emotion emotion);

// Throws ArgumentError when gap_threshold is outside (0, 3].
std::vector<HiddenLabel> derive_hidden_labels(std::span<const AnnotatedPost> corpus, Emotion emotion,
                                              double gap_threshold = 2.0,
                                              GapDirection direction = GapDirection::kWriterAbove);

enum class LabelSource { kWriter, kReaderAverage };

std::string_view label_source_name(LabelSource source) noexcept;

struct CooccurrenceMatrix {
  LabelSource source = LabelSource::kWriter;
  double strong_threshold = 2.0;
  std::array<std::array<long long, kEmotionCount>, kEmotionCount> counts{};

  long long at(Emotion a, Emotion b) const noexcept { return counts[index_of(a)][index_of(b)]; }
};

CooccurrenceMatrix cooccurrence_matrix(std::span<const AnnotatedPost> corpus, LabelSource source,
                                       double strong_threshold = 2.0);

// How reader-side strong labels are counted.
enum class ReaderCountMode {
  kAverage,     // posts whose 3-reader mean >= threshold
  kAnyReader,   // posts where at least one reader >= threshold
  kMajority,    // posts where at least two readers >= threshold
  kLabelTotal,  // individual reader labels >= threshold, summed over readers
};

std::string_view reader_count_mode_name(ReaderCountMode mode) noexcept;
ReaderCountMode parse_reader_count_mode(std::string_view name);
inline constexpr std::array<ReaderCountMode, 4> kAllReaderCountModes = {
    ReaderCountMode::kAverage, ReaderCountMode::kAnyReader, ReaderCountMode::kMajority,
    ReaderCountMode::kLabelTotal};

struct StrongLabelCounts {
  long long writer_count = 0;
  long long reader_count = 0;
};

StrongLabelCounts strong_label_counts(std::span<const AnnotatedPost> corpus, Emotion emotion,
                                      double strong_threshold = 2.0,
                                      ReaderCountMode mode = ReaderCountMode::kAverage);

// TSV: post_id, emotion, writer, reader_avg, gap, hidden (exact thirds as "n/3").
std::string labels_to_tsv(std::span<const HiddenLabel> labels);
std::vector<HiddenLabel> labels_from_tsv(std::string_view tsv);

// TSV with an "emotion" corner cell and the 8 emotions as header columns.
std::string matrix_to_tsv(const CooccurrenceMatrix& m);
CooccurrenceMatrix matrix_from_tsv(std::string_view tsv, LabelSource source, double strong_threshold);

}  // namespace emogap
