#include "emogap/keyed_text.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "emogap/errors.hpp"

namespace emogap {

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    char c = escaped[i];
    if (c != '\\' || i + 1 == escaped.size()) {
      out += c;
      continue;
    }
    switch (escaped[++i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += escaped[i];
    }
  }
  return out;
}

void KeyedRecord::set(std::string key, std::string value) {
  auto it = std::find_if(fields_.begin(), fields_.end(),
                         [&](const auto& kv) { return kv.first == key; });
  if (it != fields_.end()) {
    it->second = std::move(value);
  } else {
    fields_.emplace_back(std::move(key), std::move(value));
  }
}

bool KeyedRecord::has(std::string_view key) const noexcept {
  return std::any_of(fields_.begin(), fields_.end(),
                     [&](const auto& kv) { return kv.first == key; });
}

std::optional<std::string> KeyedRecord::find(std::string_view key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

const std::string& KeyedRecord::get(std::string_view key) const {
  for (const auto& kv : fields_) {
    if (kv.first == key) return kv.second;
  }
  throw IoError("missing key '" + std::string(key) + "'");
}

long long KeyedRecord::get_int(std::string_view key) const {
  const auto& v = get(key);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw IoError("key '" + std::string(key) + "' is not an integer: '" + v + "'");
  }
  return out;
}

double KeyedRecord::get_double(std::string_view key) const {
  const auto& v = get(key);
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw IoError("key '" + std::string(key) + "' is not a number: '" + v + "'");
  }
}

std::string KeyedRecord::format_number(double v) {
  // Shortest representation that round-trips.
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string KeyedRecord::to_line() const {
  std::string out;
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (i) out += '\t';
    out += escape_field(fields_[i].first);
    out += '=';
    out += escape_field(fields_[i].second);
  }
  return out;
}

std::string KeyedRecord::to_block() const {
  std::string out;
  for (const auto& [k, v] : fields_) {
    out += escape_field(k);
    out += '=';
    out += escape_field(v);
    out += '\n';
  }
  return out;
}

namespace {

std::pair<std::string, std::string> split_pair(std::string_view item) {
  auto eq = item.find('=');
  if (eq == std::string_view::npos) {
    throw IoError("keyed field without '=': '" + std::string(item) + "'");
  }
  return {unescape_field(item.substr(0, eq)), unescape_field(item.substr(eq + 1))};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

KeyedRecord KeyedRecord::from_line(std::string_view line) {
  KeyedRecord rec;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t start = 0;
  while (start <= line.size()) {
    auto tab = line.find('\t', start);
    auto item = line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
    if (!item.empty()) {
      auto [k, v] = split_pair(item);
      rec.set(std::move(k), std::move(v));
    }
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return rec;
}

KeyedRecord KeyedRecord::from_block(std::string_view text) {
  KeyedRecord rec;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = trim(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    if (!line.empty() && line.front() != '#') {
      auto [k, v] = split_pair(line);
      rec.set(std::string(trim(k)), std::string(trim(v)));
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return rec;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

KeyedRecord read_block_file(const std::filesystem::path& path) {
  return KeyedRecord::from_block(read_file(path));
}

void write_block_file(const std::filesystem::path& path, const KeyedRecord& record) {
  write_file(path, record.to_block());
}

}  // namespace emogap
