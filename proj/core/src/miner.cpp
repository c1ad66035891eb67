#include "emogap/miner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "emogap/errors.hpp"

namespace emogap {
namespace {

struct TokenCounts {
  std::size_t docs = 0;
  std::size_t occurrences = 0;
};

struct SetCounts {
  std::unordered_map<std::string, TokenCounts> tokens;
  std::size_t documents = 0;
  std::size_t total_tokens = 0;
};

SetCounts count_set(std::span<const Tokens> sentences) {
  SetCounts out;
  out.documents = sentences.size();
  for (const auto& s : sentences) {
    std::unordered_set<std::string_view> seen;
    for (const auto& tok : s) {
      auto& c = out.tokens[tok];
      ++c.occurrences;
      if (seen.insert(tok).second) ++c.docs;
    }
    out.total_tokens += s.size();
  }
  return out;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, '\t')) cells.push_back(cell);
  if (!line.empty() && line.back() == '\t') cells.emplace_back();
  return cells;
}

std::string fmt(double v) { return KeyedRecord::format_number(v); }

}  // namespace

std::string_view rate_mode_name(RateMode mode) noexcept {
  return mode == RateMode::kPresence ? "presence" : "token-share";
}

RateMode parse_rate_mode(std::string_view name) {
  if (name == "presence") return RateMode::kPresence;
  if (name == "token-share") return RateMode::kTokenShare;
  throw ConfigError("unknown rate mode '" + std::string(name) + "'");
}

std::set<std::string> true_positive_filter(std::span<const HiddenLabel> labels,
                                           std::span<const PredictionRecord> predictions) {
  std::unordered_map<std::string_view, bool> decision;
  for (const auto& p : predictions) decision.emplace(p.post_id, p.decision);
  if (decision.size() != predictions.size()) throw ArgumentError("duplicate post id in predictions");
  if (labels.size() != predictions.size()) {
    throw ArgumentError("labels cover " + std::to_string(labels.size()) + " posts, predictions " +
                        std::to_string(predictions.size()));
  }
  std::set<std::string> out;
  for (const auto& l : labels) {
    auto it = decision.find(l.post_id);
    if (it == decision.end()) throw ArgumentError("no prediction for post '" + l.post_id + "'");
    if (l.hidden && it->second) out.insert(l.post_id);
  }
  return out;
}

double doc_rate(std::string_view token, std::span<const Tokens> sentences) {
  if (sentences.empty()) throw ArgumentError("doc_rate over an empty sentence set");
  std::size_t hits = 0;
  for (const auto& s : sentences) {
    if (std::find(s.begin(), s.end(), token) != s.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(sentences.size());
}

ExpressionRanking expression_ranking(std::span<const Tokens> hidden, std::span<const Tokens> other,
                                     std::size_t k, std::size_t min_hidden_count, RateMode mode) {
  if (hidden.empty() || other.empty()) throw ArgumentError("expression_ranking needs two non-empty sets");
  const auto h = count_set(hidden);
  const auto o = count_set(other);
  const bool presence = mode == RateMode::kPresence;
  const auto h_den = static_cast<long long>(presence ? h.documents : h.total_tokens);
  const auto o_den = static_cast<long long>(presence ? o.documents : o.total_tokens);

  struct Candidate {
    ExpressionScore score;
    long long diff_key;  // diff * h_den * o_den, exact
    long long hidden_key;  // rate_hidden * h_den
  };
  std::vector<Candidate> candidates;
  auto consider = [&](const std::string& token) {
    auto hit = h.tokens.find(token);
    const TokenCounts hc = hit == h.tokens.end() ? TokenCounts{} : hit->second;
    if (hc.docs < min_hidden_count) return;
    auto oit = o.tokens.find(token);
    const TokenCounts oc = oit == o.tokens.end() ? TokenCounts{} : oit->second;
    const auto hn = static_cast<long long>(presence ? hc.docs : hc.occurrences);
    const auto on = static_cast<long long>(presence ? oc.docs : oc.occurrences);
    Candidate c;
    c.score.token = token;
    c.score.rate_hidden = h_den ? static_cast<double>(hn) / static_cast<double>(h_den) : 0.0;
    c.score.rate_other = o_den ? static_cast<double>(on) / static_cast<double>(o_den) : 0.0;
    c.score.diff = c.score.rate_hidden - c.score.rate_other;
    c.score.hidden_count = hc.docs;
    c.diff_key = hn * o_den - on * h_den;
    c.hidden_key = hn;
    candidates.push_back(std::move(c));
  };
  for (const auto& [token, _] : h.tokens) consider(token);
  if (min_hidden_count == 0) {
    for (const auto& [token, _] : o.tokens) {
      if (!h.tokens.count(token)) consider(token);
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.diff_key != b.diff_key) return a.diff_key > b.diff_key;
    if (a.hidden_key != b.hidden_key) return a.hidden_key > b.hidden_key;
    return a.score.token < b.score.token;
  });

  ExpressionRanking ranking;
  ranking.requested = k;
  ranking.shortfall = candidates.size() < k;
  for (std::size_t i = 0; i < std::min(k, candidates.size()); ++i) ranking.top.push_back(std::move(candidates[i].score));
  return ranking;
}

bool intensity_row_consistent(const IntensityRow& row, double tolerance) {
  if (!row.present) return false;
  double readers = 0.0;
  for (double r : row.reader_means) readers += r;
  readers /= static_cast<double>(kReaderCount);
  return std::fabs(row.writer_mean - readers - row.writer_minus_avg_reader) <= tolerance;
}

std::vector<IntensityRow> intensity_table(std::span<const AnnotatedPost> corpus,
                                          std::span<const Tokens> segmented,
                                          std::span<const std::string> tokens, Emotion emotion) {
  if (corpus.size() != segmented.size()) throw ArgumentError("segmented corpus is not aligned with the corpus");
  struct Sums {
    std::size_t n = 0;
    long long writer = 0;
    std::array<long long, kReaderCount> readers{};
  };
  auto add = [&](Sums& s, const AnnotatedPost& post) {
    if (post.readers.size() != kReaderCount) throw ArgumentError("post '" + post.post_id + "' lacks 3 readers");
    ++s.n;
    s.writer += post.writer[emotion];
    for (std::size_t r = 0; r < kReaderCount; ++r) s.readers[r] += post.readers[r][emotion];
  };
  auto finish = [](std::string label, const Sums& s) {
    IntensityRow row;
    row.token = std::move(label);
    row.sentences = s.n;
    row.present = s.n > 0;
    if (!row.present) return row;
    const auto n = static_cast<double>(s.n);
    row.writer_mean = static_cast<double>(s.writer) / n;
    long long reader_total = 0;
    for (std::size_t r = 0; r < kReaderCount; ++r) {
      row.reader_means[r] = static_cast<double>(s.readers[r]) / n;
      reader_total += s.readers[r];
    }
    // Exact numerator first: 3*writer - sum(readers), over 3n.
    row.writer_minus_avg_reader =
        static_cast<double>(3 * s.writer - reader_total) / (3.0 * n);
    return row;
  };

  std::vector<Sums> per_token(tokens.size());
  std::unordered_map<std::string_view, std::vector<std::size_t>> slots;
  for (std::size_t i = 0; i < tokens.size(); ++i) slots[tokens[i]].push_back(i);
  Sums all;
  for (std::size_t p = 0; p < corpus.size(); ++p) {
    add(all, corpus[p]);
    std::unordered_set<std::string_view> seen;
    for (const auto& tok : segmented[p]) {
      if (!seen.insert(tok).second) continue;
      auto it = slots.find(tok);
      if (it == slots.end()) continue;
      for (auto slot : it->second) add(per_token[slot], corpus[p]);
    }
  }
  std::vector<IntensityRow> rows;
  rows.reserve(tokens.size() + 1);
  for (std::size_t i = 0; i < tokens.size(); ++i) rows.push_back(finish(tokens[i], per_token[i]));
  rows.push_back(finish(std::string(kAllSentencesRow), all));
  return rows;
}

std::string ranking_to_tsv(const ExpressionRanking& ranking) {
  std::string out = "token\trate_hidden\trate_other\tdiff\thidden_count\n";
  for (const auto& s : ranking.top) {
    out += escape_field(s.token) + '\t' + fmt(s.rate_hidden) + '\t' + fmt(s.rate_other) + '\t' + fmt(s.diff) +
           '\t' + std::to_string(s.hidden_count) + '\n';
  }
  return out;
}

ExpressionRanking ranking_from_tsv(std::string_view tsv, std::size_t requested) {
  ExpressionRanking ranking;
  ranking.requested = requested;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != 5) throw IoError("malformed ranking row");
    ranking.top.push_back({unescape_field(cells[0]), std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3]),
                           static_cast<std::size_t>(std::stoull(cells[4]))});
  }
  ranking.shortfall = ranking.top.size() < requested;
  return ranking;
}

std::string intensity_to_tsv(std::span<const IntensityRow> rows) {
  std::string out = "Word\tWriter\tReader1\tReader2\tReader3\tWriter - Avg. Reader\tSentences\n";
  for (const auto& r : rows) {
    out += escape_field(r.token);
    if (!r.present) {
      out += "\tNA\tNA\tNA\tNA\tNA\t0\n";
      continue;
    }
    out += '\t' + fmt(r.writer_mean);
    for (double m : r.reader_means) out += '\t' + fmt(m);
    out += '\t' + fmt(r.writer_minus_avg_reader) + '\t' + std::to_string(r.sentences) + '\n';
  }
  return out;
}

std::vector<IntensityRow> intensity_from_tsv(std::string_view tsv) {
  std::vector<IntensityRow> rows;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != 7) throw IoError("malformed intensity row");
    IntensityRow row;
    row.token = unescape_field(cells[0]);
    row.present = cells[1] != "NA";
    row.sentences = static_cast<std::size_t>(std::stoull(cells[6]));
    if (row.present) {
      row.writer_mean = std::stod(cells[1]);
      for (std::size_t r = 0; r < kReaderCount; ++r) row.reader_means[r] = std::stod(cells[2 + r]);
      row.writer_minus_avg_reader = std::stod(cells[5]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace emogap
