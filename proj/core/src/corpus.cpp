#include "emogap/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "emogap/errors.hpp"
#include "emogap/random.hpp"

namespace emogap {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cells;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

bool is_blank(std::string_view text) {
  static constexpr std::string_view kIdeographicSpace = "\xE3\x80\x80";
  while (!text.empty()) {
    if (text.starts_with(kIdeographicSpace)) {
      text.remove_prefix(kIdeographicSpace.size());
    } else if (text.front() == ' ' || (text.front() >= '\t' && text.front() <= '\r')) {
      text.remove_prefix(1);
    } else {
      return false;
    }
  }
  return true;
}

std::string join_vector(const EmotionVector& v) {
  std::string out;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (i) out += ',';
    out += std::to_string(v.intensities[i]);
  }
  return out;
}

EmotionVector parse_vector(std::string_view s) {
  EmotionVector v;
  std::size_t idx = 0;
  std::size_t start = 0;
  while (true) {
    auto comma = s.find(',', start);
    auto cell = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (idx >= kEmotionCount) throw IoError("emotion vector has more than 8 entries");
    int value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
      throw IoError("bad intensity '" + std::string(cell) + "'");
    }
    v.intensities[idx++] = value;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (idx != kEmotionCount) throw IoError("emotion vector has fewer than 8 entries");
  return v;
}

void apply_prefix(std::array<std::string, kEmotionCount>& columns, const std::string& prefix) {
  for (auto e : kAllEmotions) columns[index_of(e)] = prefix + emotion_title(e);
}

std::string reader_prefix_for(const std::string& pattern, std::size_t reader) {
  std::string out = pattern;
  auto pos = out.find("{k}");
  if (pos == std::string::npos) {
    throw ConfigError("reader_prefix must contain '{k}': '" + pattern + "'");
  }
  out.replace(pos, 3, std::to_string(reader + 1));
  return out;
}

}  // namespace

ColumnMapping ColumnMapping::defaults() {
  ColumnMapping m;
  apply_prefix(m.writer_columns, "Writer_");
  for (std::size_t r = 0; r < kReaderCount; ++r) {
    apply_prefix(m.reader_columns[r], reader_prefix_for("Reader{k}_", r));
  }
  return m;
}

ColumnMapping ColumnMapping::from_record(const KeyedRecord& record) {
  ColumnMapping m = defaults();
  // Prefix templates first so explicit per-column keys override them.
  if (auto p = record.find("writer_prefix")) apply_prefix(m.writer_columns, *p);
  if (auto p = record.find("reader_prefix")) {
    for (std::size_t r = 0; r < kReaderCount; ++r) {
      apply_prefix(m.reader_columns[r], reader_prefix_for(*p, r));
    }
  }
  for (const auto& [key, value] : record.fields()) {
    if (key == "writer_prefix" || key == "reader_prefix") continue;
    if (key == "text") {
      m.text_column = value;
      continue;
    }
    if (key == "id") {
      m.id_column = value;
      continue;
    }
    if (key == "user") {
      m.user_column = value;
      continue;
    }
    auto dot = key.find('.');
    if (dot != std::string::npos) {
      auto who = std::string_view(key).substr(0, dot);
      auto emotion = parse_emotion(std::string_view(key).substr(dot + 1));
      if (emotion) {
        if (who == "writer") {
          m.writer_columns[index_of(*emotion)] = value;
          continue;
        }
        if (who.size() == 7 && who.starts_with("reader") && who[6] >= '1' && who[6] <= '3') {
          m.reader_columns[static_cast<std::size_t>(who[6] - '1')][index_of(*emotion)] = value;
          continue;
        }
      }
    }
    throw ConfigError("unknown column-mapping key '" + key + "'");
  }
  return m;
}

KeyedRecord ColumnMapping::to_record() const {
  KeyedRecord rec;
  rec.set("text", text_column);
  if (id_column) rec.set("id", *id_column);
  if (user_column) rec.set("user", *user_column);
  for (auto e : kAllEmotions) {
    rec.set("writer." + std::string(emotion_name(e)), writer_columns[index_of(e)]);
  }
  for (std::size_t r = 0; r < kReaderCount; ++r) {
    for (auto e : kAllEmotions) {
      rec.set("reader" + std::to_string(r + 1) + "." + std::string(emotion_name(e)),
              reader_columns[r][index_of(e)]);
    }
  }
  return rec;
}

Corpus parse_corpus(const std::filesystem::path& path, const ColumnMapping& mapping) {
  return parse_corpus_text(read_file(path), mapping);
}

Corpus parse_corpus_text(std::string_view tsv, const ColumnMapping& mapping) {
  if (tsv.starts_with("\xEF\xBB\xBF")) tsv.remove_prefix(3);
  auto lines = split_lines(tsv);
  if (lines.empty()) throw SchemaError(mapping.text_column);

  const auto header = split_tabs(lines.front());
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);
  auto locate = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw SchemaError(name);
    return it->second;
  };

  const std::size_t text_col = locate(mapping.text_column);
  const std::optional<std::size_t> id_col =
      mapping.id_column ? std::optional(locate(*mapping.id_column)) : std::nullopt;
  const std::optional<std::size_t> user_col =
      mapping.user_column ? std::optional(locate(*mapping.user_column)) : std::nullopt;
  std::array<std::size_t, kEmotionCount> writer_cols{};
  std::array<std::array<std::size_t, kEmotionCount>, kReaderCount> reader_cols{};
  for (std::size_t e = 0; e < kEmotionCount; ++e) {
    writer_cols[e] = locate(mapping.writer_columns[e]);
    for (std::size_t r = 0; r < kReaderCount; ++r) reader_cols[r][e] = locate(mapping.reader_columns[r][e]);
  }

  Corpus corpus;
  std::unordered_set<std::string> seen_ids;
  std::size_t data_row = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    // A trailing empty line is not a row.
    if (lines[li].empty() && li + 1 == lines.size()) break;
    ++data_row;
    const auto cells = split_tabs(lines[li]);
    if (cells.size() != header.size()) {
      throw RowError(data_row, "",
                     "expected " + std::to_string(header.size()) + " cells, found " +
                         std::to_string(cells.size()));
    }
    auto intensity = [&](std::size_t col) {
      const auto cell = cells[col];
      int value = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw RowError(data_row, std::string(header[col]),
                       "intensity '" + std::string(cell) + "' is not an integer");
      }
      if (value < 0 || value > kMaxIntensity) {
        throw RowError(data_row, std::string(header[col]),
                       "intensity " + std::to_string(value) + " outside 0-3");
      }
      return value;
    };

    AnnotatedPost post;
    post.text = std::string(cells[text_col]);
    if (is_blank(post.text)) throw RowError(data_row, mapping.text_column, "empty text");
    post.post_id = id_col ? std::string(cells[*id_col]) : std::to_string(data_row - 1);
    if (!seen_ids.insert(post.post_id).second) {
      throw RowError(data_row, mapping.id_column.value_or(""), "duplicate post id '" + post.post_id + "'");
    }
    if (user_col) post.user_id = std::string(cells[*user_col]);
    for (std::size_t e = 0; e < kEmotionCount; ++e) post.writer.intensities[e] = intensity(writer_cols[e]);
    post.readers.resize(kReaderCount);
    for (std::size_t r = 0; r < kReaderCount; ++r) {
      for (std::size_t e = 0; e < kEmotionCount; ++e) {
        post.readers[r].intensities[e] = intensity(reader_cols[r][e]);
      }
    }
    corpus.push_back(std::move(post));
  }
  return corpus;
}

std::string to_tsv(std::span<const AnnotatedPost> corpus, const ColumnMapping& mapping) {
  std::vector<std::string> header;
  if (mapping.id_column) header.push_back(*mapping.id_column);
  header.push_back(mapping.text_column);
  if (mapping.user_column) header.push_back(*mapping.user_column);
  for (const auto& c : mapping.writer_columns) header.push_back(c);
  for (const auto& reader : mapping.reader_columns) {
    for (const auto& c : reader) header.push_back(c);
  }
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += '\t';
    out += header[i];
  }
  out += '\n';
  for (const auto& post : corpus) {
    if (post.text.find_first_of("\t\n\r") != std::string::npos) {
      throw ArgumentError("post '" + post.post_id + "' text contains a tab or newline");
    }
    if (post.readers.size() != kReaderCount) {
      throw ArgumentError("post '" + post.post_id + "' does not have 3 readers");
    }
    std::string line;
    if (mapping.id_column) line += post.post_id + '\t';
    line += post.text;
    if (mapping.user_column) line += '\t' + post.user_id;
    for (int v : post.writer.intensities) line += '\t' + std::to_string(v);
    for (const auto& reader : post.readers) {
      for (int v : reader.intensities) line += '\t' + std::to_string(v);
    }
    out += line;
    out += '\n';
  }
  return out;
}

std::vector<Violation> validate_post(const AnnotatedPost& post) {
  std::vector<Violation> out;
  if (is_blank(post.text)) out.push_back({"text", "text is empty after trimming"});
  if (post.readers.size() != kReaderCount) {
    out.push_back({"readers", "readers.length ≠ 3"});
  }
  auto check = [&](const EmotionVector& v, const std::string& who) {
    for (auto e : kAllEmotions) {
      const int value = v[e];
      if (value < 0 || value > kMaxIntensity) {
        out.push_back({who + "." + std::string(emotion_name(e)),
                       "intensity " + std::to_string(value) + " ∉ {0,1,2,3}"});
      }
    }
  };
  check(post.writer, "writer");
  for (std::size_t r = 0; r < post.readers.size(); ++r) {
    check(post.readers[r], "reader" + std::to_string(r + 1));
  }
  return out;
}

std::string serialize_corpus(std::span<const AnnotatedPost> corpus) {
  std::string out;
  for (const auto& post : corpus) {
    KeyedRecord rec;
    rec.set("post_id", post.post_id);
    rec.set("text", post.text);
    if (!post.user_id.empty()) rec.set("user_id", post.user_id);
    rec.set("writer", join_vector(post.writer));
    for (std::size_t r = 0; r < post.readers.size(); ++r) {
      rec.set("reader" + std::to_string(r + 1), join_vector(post.readers[r]));
    }
    out += rec.to_line();
    out += '\n';
  }
  return out;
}

Corpus deserialize_corpus(std::string_view text) {
  Corpus corpus;
  for (auto line : split_lines(text)) {
    if (line.empty()) continue;
    const auto rec = KeyedRecord::from_line(line);
    AnnotatedPost post;
    post.post_id = rec.get("post_id");
    post.text = rec.get("text");
    post.user_id = rec.find("user_id").value_or("");
    post.writer = parse_vector(rec.get("writer"));
    for (std::size_t r = 1;; ++r) {
      auto reader = rec.find("reader" + std::to_string(r));
      if (!reader) break;
      post.readers.push_back(parse_vector(*reader));
    }
    corpus.push_back(std::move(post));
  }
  return corpus;
}

std::string_view split_mode_name(SplitMode mode) noexcept {
  switch (mode) {
    case SplitMode::kRandom: return "random";
    case SplitMode::kStratified: return "stratified";
    case SplitMode::kGrouped: return "grouped";
  }
  return "random";
}

SplitMode parse_split_mode(std::string_view name) {
  if (name == "random") return SplitMode::kRandom;
  if (name == "stratified") return SplitMode::kStratified;
  if (name == "grouped") return SplitMode::kGrouped;
  throw ConfigError("unknown split mode '" + std::string(name) + "'");
}

DatasetSplit split_dataset(std::span<const AnnotatedPost> corpus, SplitRatio ratio,
                           std::uint64_t seed, const SplitOptions& options) {
  if (corpus.empty()) throw ArgumentError("cannot split an empty corpus");
  if (ratio.train <= 0 || ratio.test <= 0) throw ArgumentError("split ratio components must be positive");
  if (options.mode == SplitMode::kStratified && options.strata.size() != corpus.size()) {
    throw ArgumentError("stratified split needs one label per post");
  }

  const std::size_t n = corpus.size();
  const auto denom = static_cast<std::size_t>(ratio.train + ratio.test);
  const std::size_t train_target = n * static_cast<std::size_t>(ratio.train) / denom;

  DatasetSplit split;
  split.seed = seed;
  split.ratio = ratio;
  split.mode = options.mode;
  Rng rng(seed);

  std::unordered_set<std::string> unique;
  for (const auto& post : corpus) {
    if (!unique.insert(post.post_id).second) {
      throw ArgumentError("duplicate post id '" + post.post_id + "'");
    }
  }

  switch (options.mode) {
    case SplitMode::kRandom: {
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      rng.shuffle(std::span(order));
      for (std::size_t i = 0; i < n; ++i) {
        (i < train_target ? split.train_ids : split.test_ids).insert(corpus[order[i]].post_id);
      }
      break;
    }
    case SplitMode::kStratified: {
      std::array<std::vector<std::size_t>, 2> by_class;
      for (std::size_t i = 0; i < n; ++i) by_class[options.strata[i] ? 1 : 0].push_back(i);
      const std::size_t positives = by_class[1].size();
      // Nearest-integer share of the train target for the positive class.
      const std::size_t train_pos = (2 * positives * train_target + n) / (2 * n);
      const std::array<std::size_t, 2> quota = {train_target - train_pos, train_pos};
      for (std::size_t c = 0; c < 2; ++c) {
        rng.shuffle(std::span(by_class[c]));
        for (std::size_t i = 0; i < by_class[c].size(); ++i) {
          (i < quota[c] ? split.train_ids : split.test_ids).insert(corpus[by_class[c][i]].post_id);
        }
      }
      break;
    }
    case SplitMode::kGrouped: {
      std::vector<std::string> group_order;
      std::map<std::string, std::vector<std::size_t>> groups;
      for (std::size_t i = 0; i < n; ++i) {
        const auto key = corpus[i].user_id.empty() ? "\x01" + corpus[i].post_id : corpus[i].user_id;
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) group_order.push_back(key);
        it->second.push_back(i);
      }
      rng.shuffle(std::span(group_order));
      // Whole groups go to train until the target is reached, so train may
      // overshoot the target by less than one group.
      for (const auto& key : group_order) {
        auto& side = split.train_ids.size() < train_target ? split.train_ids : split.test_ids;
        for (auto i : groups[key]) side.insert(corpus[i].post_id);
      }
      break;
    }
  }
  return split;
}

KeyedRecord split_to_record(const DatasetSplit& split) {
  KeyedRecord rec;
  rec.set("seed", std::to_string(split.seed));
  rec.set("ratio", std::to_string(split.ratio.train) + ":" + std::to_string(split.ratio.test));
  rec.set("mode", std::string(split_mode_name(split.mode)));
  rec.set_number("train_count", split.train_ids.size());
  rec.set_number("test_count", split.test_ids.size());
  // Ids in numeric order when they are all numeric, else lexicographic.
  std::vector<std::string> ids(split.test_ids.begin(), split.test_ids.end());
  const bool numeric = std::all_of(ids.begin(), ids.end(), [](const std::string& s) {
    return !s.empty() && s.size() < 19 && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  });
  if (numeric) {
    std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
  }
  std::string joined;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) joined += ' ';
    joined += ids[i];
  }
  rec.set("test_ids", joined);
  return rec;
}

DatasetSplit split_from_record(const KeyedRecord& record, std::span<const AnnotatedPost> corpus) {
  DatasetSplit split;
  split.seed = static_cast<std::uint64_t>(std::stoull(record.get("seed")));
  const auto& ratio = record.get("ratio");
  auto colon = ratio.find(':');
  if (colon == std::string::npos) throw IoError("bad split ratio '" + ratio + "'");
  split.ratio = {std::stoi(ratio.substr(0, colon)), std::stoi(ratio.substr(colon + 1))};
  split.mode = parse_split_mode(record.find("mode").value_or("random"));
  const auto& ids = record.get("test_ids");
  std::size_t start = 0;
  while (start < ids.size()) {
    auto sp = ids.find(' ', start);
    auto id = ids.substr(start, sp == std::string::npos ? std::string::npos : sp - start);
    if (!id.empty()) split.test_ids.insert(id);
    if (sp == std::string::npos) break;
    start = sp + 1;
  }
  std::size_t matched = 0;
  for (const auto& post : corpus) {
    if (split.test_ids.count(post.post_id)) {
      ++matched;
    } else {
      split.train_ids.insert(post.post_id);
    }
  }
  if (matched != split.test_ids.size()) {
    throw IoError("split artifact lists test ids that are not in the corpus");
  }
  return split;
}

}  // namespace emogap
