#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace emogap {

struct RocPoint {
  double threshold;  // decision rule: score >= threshold
  double fpr;
  double tpr;
};

// Points run from (0,0) (threshold +inf) to (1,1); one point per distinct
// score, with tied scores grouped into a single step.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

struct ConfusionCounts {
  double threshold = 0.5;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t positives() const noexcept { return tp + fn; }
  std::size_t negatives() const noexcept { return fp + tn; }
};

// Both throw MetricError for single-class labels or mismatched lengths.
RocCurve roc_curve(std::span<const double> scores, std::span<const bool> labels);
// Mann-Whitney statistic with half credit for ties.
double auc_rank(std::span<const double> scores, std::span<const bool> labels);

double trapezoid_area(std::span<const RocPoint> points);

ConfusionCounts confusion_at(std::span<const double> scores, std::span<const bool> labels, double threshold);

// Point maximizing tpr - fpr; earliest (highest threshold) wins ties.
RocPoint youden_point(const RocCurve& curve);

// threshold, fpr, tpr
std::string roc_to_tsv(const RocCurve& curve);
RocCurve roc_from_tsv(std::string_view tsv);

}  // namespace emogap
