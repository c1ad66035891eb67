#include "emogap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "emogap/errors.hpp"
#include "emogap/keyed_text.hpp"

namespace emogap {
namespace {

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts check_inputs(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
  ClassCounts c;
  for (bool l : labels) (l ? c.positives : c.negatives)++;
  if (c.positives == 0 || c.negatives == 0) throw MetricError("ROC/AUC undefined with a single class");
  for (double s : scores) {
    if (std::isnan(s)) throw MetricError("score is NaN");
  }
  return c;
}

std::vector<std::size_t> order_by_score_desc(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

double trapezoid_area(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const bool> labels) {
  const auto counts = check_inputs(scores, labels);
  const auto order = order_by_score_desc(scores);
  const auto p = static_cast<double>(counts.positives);
  const auto n = static_cast<double>(counts.negatives);

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] ? tp : fp)++;
      ++i;
    }
    curve.points.push_back({threshold, static_cast<double>(fp) / n, static_cast<double>(tp) / p});
  }
  curve.auc = trapezoid_area(curve.points);
  return curve;
}

double auc_rank(std::span<const double> scores, std::span<const bool> labels) {
  const auto counts = check_inputs(scores, labels);
  // Midranks in ascending score order; rank sum of positives gives U.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Work in doubled ranks so tie midranks stay integral.
  long double doubled_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const auto doubled_mid = static_cast<long double>(i + 1 + j);  // 2 * (i+1 + j) / 2
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) doubled_rank_sum += doubled_mid;
    }
    i = j;
  }
  const auto p = static_cast<long double>(counts.positives);
  const auto n = static_cast<long double>(counts.negatives);
  const long double u = doubled_rank_sum / 2 - p * (p + 1) / 2;
  return static_cast<double>(u / (p * n));
}

ConfusionCounts confusion_at(std::span<const double> scores, std::span<const bool> labels, double threshold) {
  if (scores.size() != labels.size()) throw MetricError("scores and labels differ in length");
  ConfusionCounts c;
  c.threshold = threshold;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i]) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

RocPoint youden_point(const RocCurve& curve) {
  if (curve.points.empty()) throw MetricError("empty ROC curve");
  RocPoint best = curve.points.front();
  for (const auto& pt : curve.points) {
    if (pt.tpr - pt.fpr > best.tpr - best.fpr) best = pt;
  }
  return best;
}

std::string roc_to_tsv(const RocCurve& curve) {
  std::string out = "threshold\tfpr\ttpr\n";
  for (const auto& pt : curve.points) {
    out += std::isinf(pt.threshold) ? std::string("inf") : KeyedRecord::format_number(pt.threshold);
    out += '\t' + KeyedRecord::format_number(pt.fpr);
    out += '\t' + KeyedRecord::format_number(pt.tpr);
    out += '\n';
  }
  return out;
}

RocCurve roc_from_tsv(std::string_view tsv) {
  RocCurve curve;
  std::istringstream in{std::string(tsv)};
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string t, f, p;
    std::getline(cells, t, '\t');
    std::getline(cells, f, '\t');
    std::getline(cells, p, '\t');
    curve.points.push_back({t == "inf" ? std::numeric_limits<double>::infinity() : std::stod(t), std::stod(f),
                            std::stod(p)});
  }
  curve.auc = trapezoid_area(curve.points);
  return curve;
}

}  // namespace emogap
