#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emogap {

// Ordered key/value record. Two on-disk forms share one escaping scheme
// (backslash escapes for '\\', '\t', '\n', '\r'):
//   single-line: key=value<TAB>key=value ...   (one record per line)
//   block:       key=value per line, '#' comments and blank lines ignored
class KeyedRecord {
 public:
  KeyedRecord() = default;

  void set(std::string key, std::string value);
  template <typename T>
  void set_number(std::string key, T value) {
    set(std::move(key), format_number(value));
  }

  bool has(std::string_view key) const noexcept;
  const std::string& get(std::string_view key) const;  // throws IoError if absent
  std::optional<std::string> find(std::string_view key) const;
  long long get_int(std::string_view key) const;
  double get_double(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& fields() const noexcept {
    return fields_;
  }

  std::string to_line() const;
  std::string to_block() const;
  static KeyedRecord from_line(std::string_view line);
  static KeyedRecord from_block(std::string_view text);

  static std::string format_number(double v);
  static std::string format_number(long long v) { return std::to_string(v); }
  static std::string format_number(int v) { return std::to_string(v); }
  static std::string format_number(std::size_t v) { return std::to_string(v); }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string escape_field(std::string_view raw);
std::string unescape_field(std::string_view escaped);

std::string read_file(const std::filesystem::path& path);
// Writes atomically enough for our purposes: truncate + write, throws IoError.
void write_file(const std::filesystem::path& path, std::string_view content);

KeyedRecord read_block_file(const std::filesystem::path& path);
void write_block_file(const std::filesystem::path& path, const KeyedRecord& record);

}  // namespace emogap
