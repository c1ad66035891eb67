#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "emogap/detector.hpp"
#include "emogap/errors.hpp"
#include "emogap/hashing.hpp"
#include "emogap/random.hpp"

namespace emogap::detail {
namespace {

constexpr std::string_view kMagic = "emogap-baseline-v1";

struct SparseRow {
  std::vector<std::pair<std::size_t, double>> entries;
};

SparseRow featurize(const Vocabulary& vocab, const Tokens& tokens) {
  std::unordered_map<std::size_t, double> counts;
  for (const auto& t : tokens) {
    auto it = vocab.index.find(t);
    if (it != vocab.index.end()) counts[it->second] += 1.0;
  }
  SparseRow row;
  row.entries.assign(counts.begin(), counts.end());
  std::sort(row.entries.begin(), row.entries.end());
  return row;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::string hex(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  (void)ec;
  return std::string(buf, ptr);
}

double unhex(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw IntegrityError("baseline blob: bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

BaselineModel fit_baseline(const DetectorConfig& config, std::span<const TrainingExample> examples) {
  std::vector<std::string> texts;
  texts.reserve(examples.size());
  for (const auto& ex : examples) texts.push_back(ex.text);
  const auto docs = Segmenter(config.segmenter).segment_all(texts);

  BaselineModel model;
  try {
    model.vocabulary = build_vocabulary(std::span<const Tokens>(docs), config.min_df);
  } catch (const EmptyVocabularyError& e) {
    throw TrainingError(std::string("baseline vocabulary is empty: ") + e.what());
  }
  const std::size_t dim = model.vocabulary.size();
  model.weights.assign(dim, 0.0);

  std::vector<SparseRow> rows;
  rows.reserve(docs.size());
  for (const auto& d : docs) rows.push_back(featurize(model.vocabulary, d));

  const std::size_t n = examples.size();
  const auto positives = static_cast<double>(
      std::count_if(examples.begin(), examples.end(), [](const auto& e) { return e.hidden; }));
  const double pos_weight = config.class_weighting ? static_cast<double>(n) / (2.0 * positives) : 1.0;
  const double neg_weight =
      config.class_weighting ? static_cast<double>(n) / (2.0 * (static_cast<double>(n) - positives)) : 1.0;

  // Adam state; slot `dim` is the bias.
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::vector<double> m(dim + 1, 0.0), v(dim + 1, 0.0), grad(dim + 1, 0.0);
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  Rng rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.baseline_epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        double z = model.bias;
        for (const auto& [j, x] : rows[i].entries) z += model.weights[j] * x;
        const double y = examples[i].hidden ? 1.0 : 0.0;
        const double err = (sigmoid(z) - y) * (examples[i].hidden ? pos_weight : neg_weight);
        for (const auto& [j, x] : rows[i].entries) grad[j] += err * x;
        grad[dim] += err;
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      beta1_pow *= kBeta1;
      beta2_pow *= kBeta2;
      const double lr = config.baseline_learning_rate;
      for (std::size_t j = 0; j <= dim; ++j) {
        double g = grad[j] * scale;
        double& param = j == dim ? model.bias : model.weights[j];
        if (j != dim) g += config.l2 * param;
        m[j] = kBeta1 * m[j] + (1 - kBeta1) * g;
        v[j] = kBeta2 * v[j] + (1 - kBeta2) * g * g;
        const double m_hat = m[j] / (1 - beta1_pow);
        const double v_hat = v[j] / (1 - beta2_pow);
        param -= lr * m_hat / (std::sqrt(v_hat) + kEps);
      }
    }
  }
  return model;
}

double baseline_score(const BaselineModel& model, const Tokens& tokens) {
  double z = model.bias;
  for (const auto& [j, x] : featurize(model.vocabulary, tokens).entries) z += model.weights[j] * x;
  return sigmoid(z);
}

std::string encode_baseline(const BaselineModel& model) {
  std::string body(kMagic);
  body += "\ndim=" + std::to_string(model.weights.size());
  body += "\nbias=" + hex(model.bias) + "\n";
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    body += escape_field(model.vocabulary.tokens[j]);
    body += '\t' + std::to_string(model.vocabulary.document_frequency[j]);
    body += '\t' + hex(model.weights[j]) + '\n';
  }
  return body + "checksum=" + sha256_hex(body) + "\n";
}

BaselineModel decode_baseline(std::string_view blob) {
  const auto marker = blob.rfind("checksum=");
  if (marker == std::string_view::npos) throw IntegrityError("baseline blob: missing checksum");
  const auto body = blob.substr(0, marker);
  auto digest = blob.substr(marker + 9);
  while (!digest.empty() && (digest.back() == '\n' || digest.back() == '\r')) digest.remove_suffix(1);
  if (sha256_hex(body) != digest) throw IntegrityError("baseline blob: checksum mismatch");

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < body.size()) {
    auto nl = body.find('\n', start);
    lines.push_back(body.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.size() < 3 || lines[0] != kMagic || !lines[1].starts_with("dim=") || !lines[2].starts_with("bias=")) {
    throw IntegrityError("baseline blob: bad header");
  }
  const auto dim = static_cast<std::size_t>(std::stoull(std::string(lines[1].substr(4))));
  if (lines.size() != dim + 3) throw IntegrityError("baseline blob: dimension mismatch");

  BaselineModel model;
  model.bias = unhex(lines[2].substr(5));
  for (std::size_t j = 0; j < dim; ++j) {
    const auto line = lines[j + 3];
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string_view::npos || t2 == std::string_view::npos) {
      throw IntegrityError("baseline blob: malformed weight row");
    }
    auto token = unescape_field(line.substr(0, t1));
    model.vocabulary.index.emplace(token, j);
    model.vocabulary.tokens.push_back(std::move(token));
    model.vocabulary.document_frequency.push_back(std::stoull(std::string(line.substr(t1 + 1, t2 - t1 - 1))));
    model.weights.push_back(unhex(line.substr(t2 + 1)));
  }
  return model;
}

}  // namespace emogap::detail
