#include "emogap/labels.hpp"

#include <charconv>
#include <numeric>
#include <sstream>

#include "emogap/errors.hpp"

namespace emogap {
namespace {

void require_threshold(double threshold, const char* what) {
  if (!(threshold > 0.0 && threshold <= kMaxIntensity)) {
    throw ArgumentError(std::string(what) + " must lie in (0, 3]");
  }
}

const std::vector<EmotionVector>& readers_of(const AnnotatedPost& post) {
  if (post.readers.size() != kReaderCount) {
    throw ArgumentError("post '" + post.post_id + "' does not have exactly 3 readers");
  }
  return post.readers;
}

Thirds parse_thirds(std::string_view s) {
  int num = 0;
  auto slash = s.find('/');
  auto head = s.substr(0, slash);
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), num);
  if (ec != std::errc{} || ptr != head.data() + head.size()) {
    throw IoError("bad rational '" + std::string(s) + "'");
  }
  if (slash == std::string_view::npos) return Thirds::whole(num);
  if (s.substr(slash + 1) != "3") throw IoError("rational '" + std::string(s) + "' is not in thirds");
  return {num};
}

std::vector<std::string_view> cells_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
}

}  // namespace

std::string to_string(Thirds t) {
  const int n = t.numerator;
  if (n % 3 == 0) return std::to_string(n / 3);
  return std::to_string(n) + "/3";
}

Thirds reader_average(const AnnotatedPost& post, Emotion emotion) {
  const auto& readers = readers_of(post);
  int sum = 0;
  for (const auto& r : readers) sum += r[emotion];
  return {sum};
}

Thirds hidden_gap(const AnnotatedPost& post, Emotion emotion) {
  return Thirds::whole(post.writer[emotion]) - reader_average(post, emotion);
}

std::vector<HiddenLabel> derive_hidden_labels(std::span<const AnnotatedPost> corpus, Emotion emotion,
                                              double gap_threshold, GapDirection direction) {
  require_threshold(gap_threshold, "gap_threshold");
  std::vector<HiddenLabel> labels;
  labels.reserve(corpus.size());
  for (const auto& post : corpus) {
    HiddenLabel label;
    label.post_id = post.post_id;
    label.emotion = emotion;
    label.writer_intensity = post.writer[emotion];
    label.reader_avg = reader_average(post, emotion);
    label.gap = Thirds::whole(label.writer_intensity) - label.reader_avg;
    const Thirds directed = direction == GapDirection::kWriterAbove ? label.gap : Thirds{-label.gap.numerator};
    label.hidden = directed.at_least(gap_threshold);
    labels.push_back(std::move(label));
  }
  return labels;
}

std::string_view label_source_name(LabelSource source) noexcept {
  return source == LabelSource::kWriter ? "writer" : "reader-average";
}

CooccurrenceMatrix cooccurrence_matrix(std::span<const AnnotatedPost> corpus, LabelSource source,
                                       double strong_threshold) {
  require_threshold(strong_threshold, "strong_threshold");
  CooccurrenceMatrix m;
  m.source = source;
  m.strong_threshold = strong_threshold;
  for (const auto& post : corpus) {
    std::array<bool, kEmotionCount> strong{};
    for (auto e : kAllEmotions) {
      const Thirds level =
          source == LabelSource::kWriter ? Thirds::whole(post.writer[e]) : reader_average(post, e);
      strong[index_of(e)] = level.at_least(strong_threshold);
    }
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
      if (!strong[i]) continue;
      for (std::size_t j = 0; j < kEmotionCount; ++j) {
        if (strong[j]) ++m.counts[i][j];
      }
    }
  }
  return m;
}

std::string_view reader_count_mode_name(ReaderCountMode mode) noexcept {
  switch (mode) {
    case ReaderCountMode::kAverage: return "average";
    case ReaderCountMode::kAnyReader: return "any-reader";
    case ReaderCountMode::kMajority: return "majority";
    case ReaderCountMode::kLabelTotal: return "label-total";
  }
  return "average";
}

ReaderCountMode parse_reader_count_mode(std::string_view name) {
  for (auto mode : kAllReaderCountModes) {
    if (reader_count_mode_name(mode) == name) return mode;
  }
  throw ConfigError("unknown reader counting mode '" + std::string(name) + "'");
}

StrongLabelCounts strong_label_counts(std::span<const AnnotatedPost> corpus, Emotion emotion,
                                      double strong_threshold, ReaderCountMode mode) {
  require_threshold(strong_threshold, "strong_threshold");
  StrongLabelCounts counts;
  for (const auto& post : corpus) {
    if (post.writer[emotion] >= strong_threshold) ++counts.writer_count;
    const auto& readers = readers_of(post);
    int strong_readers = 0;
    for (const auto& r : readers) strong_readers += r[emotion] >= strong_threshold ? 1 : 0;
    switch (mode) {
      case ReaderCountMode::kAverage:
        counts.reader_count += reader_average(post, emotion).at_least(strong_threshold) ? 1 : 0;
        break;
      case ReaderCountMode::kAnyReader: counts.reader_count += strong_readers > 0 ? 1 : 0; break;
      case ReaderCountMode::kMajority: counts.reader_count += strong_readers >= 2 ? 1 : 0; break;
      case ReaderCountMode::kLabelTotal: counts.reader_count += strong_readers; break;
    }
  }
  return counts;
}

std::string labels_to_tsv(std::span<const HiddenLabel> labels) {
  std::string out = "post_id\temotion\twriter\treader_avg\tgap\thidden\n";
  for (const auto& l : labels) {
    out += l.post_id;
    out += '\t';
    out += emotion_name(l.emotion);
    out += '\t' + std::to_string(l.writer_intensity);
    out += '\t' + to_string(l.reader_avg);
    out += '\t' + to_string(l.gap);
    out += l.hidden ? "\t1\n" : "\t0\n";
  }
  return out;
}

std::vector<HiddenLabel> labels_from_tsv(std::string_view tsv) {
  std::vector<HiddenLabel> labels;
  bool header = true;
  for_each_line(tsv, [&](std::string_view line) {
    if (header) {
      header = false;
      return;
    }
    auto cells = cells_of(line);
    if (cells.size() != 6) throw IoError("labels TSV row has " + std::to_string(cells.size()) + " cells");
    HiddenLabel l;
    l.post_id = std::string(cells[0]);
    l.emotion = emotion_from_name(cells[1]);
    l.writer_intensity = parse_thirds(cells[2]).numerator / 3;
    l.reader_avg = parse_thirds(cells[3]);
    l.gap = parse_thirds(cells[4]);
    l.hidden = cells[5] == "1";
    labels.push_back(std::move(l));
  });
  return labels;
}

std::string matrix_to_tsv(const CooccurrenceMatrix& m) {
  std::string out = "emotion";
  for (auto e : kAllEmotions) {
    out += '\t';
    out += emotion_name(e);
  }
  out += '\n';
  for (auto row : kAllEmotions) {
    out += emotion_name(row);
    for (auto col : kAllEmotions) out += '\t' + std::to_string(m.at(row, col));
    out += '\n';
  }
  return out;
}

CooccurrenceMatrix matrix_from_tsv(std::string_view tsv, LabelSource source, double strong_threshold) {
  CooccurrenceMatrix m;
  m.source = source;
  m.strong_threshold = strong_threshold;
  std::size_t row = 0;
  bool header = true;
  for_each_line(tsv, [&](std::string_view line) {
    if (header) {
      header = false;
      return;
    }
    auto cells = cells_of(line);
    if (row >= kEmotionCount || cells.size() != kEmotionCount + 1) throw IoError("malformed matrix TSV");
    for (std::size_t c = 0; c < kEmotionCount; ++c) {
      m.counts[row][c] = std::stoll(std::string(cells[c + 1]));
    }
    ++row;
  });
  if (row != kEmotionCount) throw IoError("matrix TSV must have 8 rows");
  return m;
}

}  // namespace emogap
