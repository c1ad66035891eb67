#include "emogap/segmenter.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <unordered_set>

#include <unistd.h>

#include "emogap/errors.hpp"
#include "emogap/keyed_text.hpp"

namespace emogap {
namespace {

// Byte ranges of each code point; malformed bytes count as one code point.
std::vector<std::size_t> code_point_offsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    offsets.push_back(static_cast<std::size_t>(i));
    UChar32 c;
    U8_NEXT(s, i, length, c);
    (void)c;
  }
  offsets.push_back(text.size());
  return offsets;
}

}  // namespace

std::string_view segment_mode_name(SegmentMode mode) noexcept {
  switch (mode) {
    case SegmentMode::kWhitespace: return "whitespace";
    case SegmentMode::kCharNgram: return "char-ngram";
    case SegmentMode::kExternal: return "external-morphological";
  }
  return "whitespace";
}

SegmentMode parse_segment_mode(std::string_view name) {
  if (name == "whitespace") return SegmentMode::kWhitespace;
  if (name == "char-ngram") return SegmentMode::kCharNgram;
  if (name == "external-morphological" || name == "external") return SegmentMode::kExternal;
  throw ConfigError("unknown segmenter mode '" + std::string(name) + "'");
}

std::string_view normalizer_name(Normalizer n) noexcept {
  return n == Normalizer::kNone ? "none" : "unicode-compatibility-fold";
}

Normalizer parse_normalizer(std::string_view name) {
  if (name == "none") return Normalizer::kNone;
  if (name == "unicode-compatibility-fold" || name == "nfkc") return Normalizer::kCompatibilityFold;
  throw ConfigError("unknown normalizer '" + std::string(name) + "'");
}

void SegmenterConfig::validate() const {
  if (ngram_n < 1 || ngram_n > 8) throw ConfigError("ngram_n must lie in [1, 8]");
}

std::vector<Tokens> SegmenterAdapter::tokenize_batch(std::span<const std::string> texts) const {
  std::vector<Tokens> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(tokenize(t));
  return out;
}

Tokens CommandAdapter::tokenize(std::string_view text) const {
  std::string one(text);
  return tokenize_batch(std::span(&one, 1)).front();
}

std::vector<Tokens> CommandAdapter::tokenize_batch(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  const auto input = std::filesystem::temp_directory_path() /
                     ("emogap-seg-" + std::to_string(::getpid()) + "-" +
                      std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".txt");
  std::string payload;
  for (const auto& t : texts) {
    if (t.find('\n') != std::string::npos) throw ArgumentError("adapter input contains a newline");
    payload += t;
    payload += '\n';
  }
  write_file(input, payload);
  const std::string cmd = command_ + " < '" + input.string() + "'";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    std::filesystem::remove(input);
    throw ConfigError("cannot start segmenter command: " + command_);
  }
  std::string output;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
  const int status = ::pclose(pipe);
  std::filesystem::remove(input);
  if (status != 0) throw ConfigError("segmenter command failed: " + command_);

  std::vector<Tokens> out;
  std::size_t start = 0;
  while (start < output.size() && out.size() < texts.size()) {
    auto nl = output.find('\n', start);
    std::string_view line(output.data() + start,
                          (nl == std::string::npos ? output.size() : nl) - start);
    Tokens tokens;
    std::size_t p = 0;
    while (p < line.size()) {
      auto sp = line.find_first_of(" \t\r", p);
      auto tok = line.substr(p, sp == std::string_view::npos ? std::string_view::npos : sp - p);
      if (!tok.empty()) tokens.emplace_back(tok);
      if (sp == std::string_view::npos) break;
      p = sp + 1;
    }
    out.push_back(std::move(tokens));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  if (out.size() != texts.size()) {
    throw ConfigError("segmenter command returned " + std::to_string(out.size()) + " lines for " +
                      std::to_string(texts.size()) + " texts");
  }
  return out;
}

void AdapterRegistry::add(std::string name, std::shared_ptr<const SegmenterAdapter> adapter) {
  std::lock_guard lock(mutex_);
  adapters_[std::move(name)] = std::move(adapter);
}

std::shared_ptr<const SegmenterAdapter> AdapterRegistry::find(std::string_view name) const {
  std::lock_guard lock(mutex_);
  auto it = adapters_.find(name);
  return it == adapters_.end() ? nullptr : it->second;
}

AdapterRegistry& AdapterRegistry::global() {
  static AdapterRegistry registry;
  return registry;
}

std::string compatibility_fold(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw ConfigError("ICU NFKC normalizer unavailable");
  auto source = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString folded = nfkc->normalize(source, status);
  if (U_FAILURE(status)) throw ArgumentError("normalization failed");
  std::string out;
  folded.toUTF8String(out);
  return out;
}

std::size_t code_point_count(std::string_view text) { return code_point_offsets(text).size() - 1; }

Segmenter::Segmenter(SegmenterConfig config, const AdapterRegistry& registry)
    : config_(std::move(config)) {
  config_.validate();
  if (config_.mode == SegmentMode::kExternal) {
    adapter_ = registry.find(config_.adapter);
    if (!adapter_) {
      throw ConfigError("external segmenter mode but no adapter registered as '" + config_.adapter + "'");
    }
  }
}

std::string Segmenter::normalize(std::string_view text) const {
  return config_.normalizer == Normalizer::kCompatibilityFold ? compatibility_fold(text) : std::string(text);
}

Tokens Segmenter::segment(std::string_view raw) const {
  const std::string text = normalize(raw);
  Tokens tokens;
  switch (config_.mode) {
    case SegmentMode::kWhitespace: {
      const auto* s = reinterpret_cast<const uint8_t*>(text.data());
      const auto length = static_cast<int32_t>(text.size());
      int32_t i = 0;
      int32_t token_start = -1;
      while (i < length) {
        const int32_t at = i;
        UChar32 c;
        U8_NEXT(s, i, length, c);
        const bool space = c >= 0 && u_isUWhiteSpace(c);
        if (space && token_start >= 0) {
          tokens.emplace_back(text.substr(static_cast<std::size_t>(token_start),
                                          static_cast<std::size_t>(at - token_start)));
          token_start = -1;
        } else if (!space && token_start < 0) {
          token_start = at;
        }
      }
      if (token_start >= 0) tokens.emplace_back(text.substr(static_cast<std::size_t>(token_start)));
      break;
    }
    case SegmentMode::kCharNgram: {
      const auto offsets = code_point_offsets(text);
      const std::size_t count = offsets.size() - 1;
      const auto n = static_cast<std::size_t>(config_.ngram_n);
      for (std::size_t i = 0; i + n <= count; ++i) {
        tokens.emplace_back(text.substr(offsets[i], offsets[i + n] - offsets[i]));
      }
      break;
    }
    case SegmentMode::kExternal:
      if (!text.empty()) tokens = adapter_->tokenize(text);
      break;
  }
  return tokens;
}

std::vector<Tokens> Segmenter::segment_all(std::span<const std::string> texts) const {
  if (config_.mode != SegmentMode::kExternal) {
    std::vector<Tokens> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(segment(t));
    return out;
  }
  std::vector<std::string> normalized;
  normalized.reserve(texts.size());
  for (const auto& t : texts) normalized.push_back(normalize(t));
  return adapter_->tokenize_batch(normalized);
}

Tokens segment(std::string_view text, const SegmenterConfig& config) {
  return Segmenter(config).segment(text);
}

long long Vocabulary::lookup(std::string_view token) const {
  auto it = index.find(std::string(token));
  return it == index.end() ? -1 : static_cast<long long>(it->second);
}

Vocabulary build_vocabulary(std::span<const std::string> texts, const SegmenterConfig& config,
                            std::size_t min_df) {
  if (texts.empty()) throw ArgumentError("build_vocabulary needs at least one text");
  const auto docs = Segmenter(config).segment_all(texts);
  return build_vocabulary(std::span<const Tokens>(docs), min_df);
}

Vocabulary build_vocabulary(std::span<const Tokens> documents, std::size_t min_df) {
  if (documents.empty()) throw ArgumentError("build_vocabulary needs at least one text");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::unordered_set<std::string_view> seen;
    for (const auto& tok : doc) {
      if (seen.insert(tok).second) ++df[tok];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, count] : df) {
    if (count >= min_df) kept.emplace_back(tok, count);
  }
  if (kept.empty()) throw EmptyVocabularyError("no token reaches min_df=" + std::to_string(min_df));
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary vocab;
  vocab.tokens.reserve(kept.size());
  for (auto& [tok, count] : kept) {
    vocab.index.emplace(tok, vocab.tokens.size());
    vocab.tokens.push_back(std::move(tok));
    vocab.document_frequency.push_back(count);
  }
  return vocab;
}

}  // namespace emogap
