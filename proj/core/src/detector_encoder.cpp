#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "emogap/detector.hpp"
#include "emogap/errors.hpp"
#include "emogap/hashing.hpp"

namespace emogap::detail {
namespace {

constexpr std::string_view kMagic = "emogap-encoder-v1";

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

void run_command(const std::string& cmd, const std::filesystem::path& log) {
  const int status = std::system((cmd + " > " + shell_quote(log.string()) + " 2>&1").c_str());
  if (status != 0) {
    std::string tail;
    try {
      tail = read_file(log);
      if (tail.size() > 2000) tail = tail.substr(tail.size() - 2000);
    } catch (const Error&) {
    }
    throw TrainingError("encoder runner failed (status " + std::to_string(status) + "): " + tail);
  }
}

std::vector<std::filesystem::path> weight_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto rel = std::filesystem::relative(entry.path(), dir);
    if (rel.filename() == "train.log" || rel.filename() == "train_data.tsv") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

bool checkpoint_missing(const std::string& checkpoint) {
  if (checkpoint.empty()) return true;
  const bool looks_local = checkpoint.front() == '/' || checkpoint.front() == '~' ||
                           checkpoint.starts_with("./") || checkpoint.starts_with("../");
  return looks_local && !std::filesystem::exists(checkpoint);
}

std::filesystem::path resolve_runner(const DetectorConfig& config) {
  if (!config.encoder_runner.empty()) return config.encoder_runner;
  if (const char* env = std::getenv("EMOGAP_ENCODER_RUNNER"); env && *env) return env;
#ifdef EMOGAP_RUNNER_SOURCE_PATH
  if (std::filesystem::exists(EMOGAP_RUNNER_SOURCE_PATH)) return EMOGAP_RUNNER_SOURCE_PATH;
#endif
#ifdef EMOGAP_RUNNER_INSTALL_PATH
  if (std::filesystem::exists(EMOGAP_RUNNER_INSTALL_PATH)) return EMOGAP_RUNNER_INSTALL_PATH;
#endif
  throw ConfigError("encoder runner script not found; set EMOGAP_ENCODER_RUNNER");
}

std::string run_encoder_training(const DetectorConfig& config, std::span<const TrainingExample> examples,
                                 const std::filesystem::path& weights_dir) {
  const auto runner = resolve_runner(config);
  const auto data = weights_dir / "train_data.tsv";
  std::string payload;
  for (const auto& ex : examples) {
    payload += ex.hidden ? "1\t" : "0\t";
    payload += escape_field(ex.text);
    payload += '\n';
  }
  write_file(data, payload);

  char lr[64];
  std::snprintf(lr, sizeof lr, "%.17g", config.learning_rate);
  char dropout[64];
  std::snprintf(dropout, sizeof dropout, "%.17g", config.dropout_rate);
  std::string cmd = shell_quote(config.python) + " " + shell_quote(runner.string()) + " train" +
                    " --checkpoint " + shell_quote(config.encoder_checkpoint) +
                    " --data " + shell_quote(data.string()) +
                    " --out " + shell_quote(weights_dir.string()) +
                    " --epochs " + std::to_string(config.epochs) +
                    " --batch-size " + std::to_string(config.batch_size) +
                    " --learning-rate " + lr + " --dropout " + dropout +
                    " --seed " + std::to_string(config.seed) +
                    " --max-length " + std::to_string(config.max_length);
  if (config.class_weighting) cmd += " --class-weighting";
  run_command(cmd, weights_dir / "train.log");
  std::filesystem::remove(data);

  std::string body(kMagic);
  body += "\ncheckpoint=" + escape_field(config.encoder_checkpoint) + "\n";
  for (const auto& rel : weight_files(weights_dir)) {
    body += escape_field(rel.generic_string()) + '\t' + sha256_file(weights_dir / rel) + '\n';
  }
  return body + "checksum=" + sha256_hex(body) + "\n";
}

void verify_encoder_blob(std::string_view blob, const std::filesystem::path& weights_dir) {
  const auto marker = blob.rfind("checksum=");
  if (marker == std::string_view::npos || !blob.starts_with(kMagic)) {
    throw IntegrityError("encoder blob: malformed");
  }
  const auto body = blob.substr(0, marker);
  auto digest = blob.substr(marker + 9);
  while (!digest.empty() && digest.back() == '\n') digest.remove_suffix(1);
  if (sha256_hex(body) != digest) throw IntegrityError("encoder blob: checksum mismatch");
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < body.size()) {
    auto nl = body.find('\n', start);
    auto line = body.substr(start, nl - start);
    start = nl + 1;
    if (line_no++ < 2) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw IntegrityError("encoder blob: malformed file row");
    const auto file = weights_dir / unescape_field(line.substr(0, tab));
    if (!std::filesystem::exists(file) || sha256_file(file) != line.substr(tab + 1)) {
      throw IntegrityError("encoder weights changed or missing: " + file.string());
    }
  }
}

std::vector<double> run_encoder_prediction(const DetectorConfig& config, const std::filesystem::path& weights_dir,
                                           std::span<const std::string> texts) {
  const auto runner = resolve_runner(config);
  const auto scratch = std::filesystem::temp_directory_path() /
                       ("emogap-predict-" + sha256_hex(weights_dir.string()).substr(0, 12));
  std::filesystem::create_directories(scratch);
  std::string payload;
  for (const auto& t : texts) payload += escape_field(t) + '\n';
  write_file(scratch / "texts.txt", payload);
  const std::string cmd = shell_quote(config.python) + " " + shell_quote(runner.string()) + " predict" +
                          " --model " + shell_quote(weights_dir.string()) +
                          " --data " + shell_quote((scratch / "texts.txt").string()) +
                          " --out " + shell_quote((scratch / "scores.txt").string()) +
                          " --batch-size " + std::to_string(config.batch_size) +
                          " --max-length " + std::to_string(config.max_length);
  run_command(cmd, scratch / "predict.log");
  const auto text = read_file(scratch / "scores.txt");
  std::filesystem::remove_all(scratch);

  std::vector<double> scores;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start);
    if (!line.empty()) scores.push_back(std::stod(line));
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  if (scores.size() != texts.size()) throw IntegrityError("encoder runner returned the wrong number of scores");
  return scores;
}

}  // namespace emogap::detail
