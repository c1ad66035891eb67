#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emogap {

using Tokens = std::vector<std::string>;

enum class SegmentMode { kWhitespace, kCharNgram, kExternal };
enum class Normalizer { kNone, kCompatibilityFold };

std::string_view segment_mode_name(SegmentMode mode) noexcept;
SegmentMode parse_segment_mode(std::string_view name);
std::string_view normalizer_name(Normalizer n) noexcept;
Normalizer parse_normalizer(std::string_view name);

struct SegmenterConfig {
  SegmentMode mode = SegmentMode::kWhitespace;
  int ngram_n = 2;  // char-ngram mode, 1..8
  Normalizer normalizer = Normalizer::kNone;
  std::string adapter;  // external mode: registered adapter name

  void validate() const;  // throws ConfigError
};

// Contract for an external morphological analyzer: UTF-8 in, tokens out.
class SegmenterAdapter {
 public:
  virtual ~SegmenterAdapter() = default;
  virtual Tokens tokenize(std::string_view text) const = 0;
  virtual std::vector<Tokens> tokenize_batch(std::span<const std::string> texts) const;
  // False means the pipeline must not call this adapter concurrently.
  virtual bool thread_safe() const noexcept { return false; }
};

// Runs a shell command once per batch: one text per stdin line, one line of
// space-separated tokens per text on stdout (e.g. "mecab -Owakati").
class CommandAdapter final : public SegmenterAdapter {
 public:
  explicit CommandAdapter(std::string command) : command_(std::move(command)) {}
  Tokens tokenize(std::string_view text) const override;
  std::vector<Tokens> tokenize_batch(std::span<const std::string> texts) const override;

 private:
  std::string command_;
};

class AdapterRegistry {
 public:
  void add(std::string name, std::shared_ptr<const SegmenterAdapter> adapter);
  std::shared_ptr<const SegmenterAdapter> find(std::string_view name) const;

  static AdapterRegistry& global();

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const SegmenterAdapter>, std::less<>> adapters_;
};

// NFKC compatibility fold (width variants, compatibility ideographs).
std::string compatibility_fold(std::string_view text);
// Number of code points.
std::size_t code_point_count(std::string_view text);

class Segmenter {
 public:
  explicit Segmenter(SegmenterConfig config, const AdapterRegistry& registry = AdapterRegistry::global());

  Tokens segment(std::string_view text) const;
  std::vector<Tokens> segment_all(std::span<const std::string> texts) const;
  const SegmenterConfig& config() const noexcept { return config_; }

 private:
  std::string normalize(std::string_view text) const;

  SegmenterConfig config_;
  std::shared_ptr<const SegmenterAdapter> adapter_;
};

Tokens segment(std::string_view text, const SegmenterConfig& config);

struct Vocabulary {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> document_frequency;  // aligned with tokens

  std::size_t size() const noexcept { return tokens.size(); }
  // -1 when absent.
  long long lookup(std::string_view token) const;
};

// Tokens with document frequency >= min_df, ordered by (-df, token).
Vocabulary build_vocabulary(std::span<const std::string> texts, const SegmenterConfig& config,
                            std::size_t min_df = 2);
Vocabulary build_vocabulary(std::span<const Tokens> documents, std::size_t min_df = 2);

}  // namespace emogap
