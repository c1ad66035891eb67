#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "emogap/errors.hpp"
#include "emogap/metrics.hpp"

using namespace emogap;

namespace {

struct Labels {
  std::unique_ptr<bool[]> data;
  std::size_t n;
  explicit Labels(const std::vector<int>& v) : data(new bool[v.size()]), n(v.size()) {
    for (std::size_t i = 0; i < n; ++i) data[i] = v[i] != 0;
  }
  std::span<const bool> span() const { return {data.get(), n}; }
};

double pair_count_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

}  // namespace

TEST_CASE("oracle: worked AUC example") {
  const std::vector<double> s = {0.9, 0.8, 0.4, 0.3};
  const Labels y({1, 0, 1, 0});
  CHECK(auc_rank(s, y.span()) == doctest::Approx(0.75).epsilon(1e-12));
  const auto roc = roc_curve(s, y.span());
  CHECK(roc.auc == doctest::Approx(0.75).epsilon(1e-12));
  REQUIRE(roc.points.size() == 5);
  CHECK(std::isinf(roc.points.front().threshold));
  CHECK(roc.points.front().fpr == 0.0);
  CHECK(roc.points.back().tpr == 1.0);
  CHECK(roc.points.back().fpr == 1.0);
}

TEST_CASE("perfect, inverted and constant scores") {
  const Labels y({1, 1, 0, 0});
  CHECK(auc_rank(std::vector<double>{4, 3, 2, 1}, y.span()) == 1.0);
  CHECK(auc_rank(std::vector<double>{1, 2, 3, 4}, y.span()) == 0.0);
  CHECK(auc_rank(std::vector<double>{1, 1, 1, 1}, y.span()) == 0.5);
  const auto tied = roc_curve(std::vector<double>{1, 1, 1, 1}, y.span());
  CHECK(tied.points.size() == 2);
  CHECK(tied.auc == 0.5);
}

TEST_CASE("single class and length mismatch are metric errors") {
  const Labels ones({1, 1});
  CHECK_THROWS_AS(auc_rank(std::vector<double>{0.1, 0.2}, ones.span()), MetricError);
  CHECK_THROWS_AS(roc_curve(std::vector<double>{0.1, 0.2}, ones.span()), MetricError);
  const Labels mixed({1, 0, 1});
  CHECK_THROWS_AS(auc_rank(std::vector<double>{0.1, 0.2}, mixed.span()), MetricError);
}

TEST_CASE("oracle: random inputs agree with pair counting") {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 80;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(gen() % 10) / 10.0;  // many ties
      y[i] = static_cast<int>(gen() % 2);
    }
    y[0] = 1;
    y[1] = 0;
    const Labels labels(y);
    const double expected = pair_count_auc(s, y);
    CHECK(auc_rank(s, labels.span()) == doctest::Approx(expected).epsilon(1e-9));
    const auto roc = roc_curve(s, labels.span());
    CHECK(roc.auc == doctest::Approx(expected).epsilon(1e-9));
    CHECK(trapezoid_area(roc.points) == doctest::Approx(roc.auc).epsilon(1e-12));
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
      CHECK(roc.points[i].fpr >= roc.points[i - 1].fpr);
      CHECK(roc.points[i].tpr >= roc.points[i - 1].tpr);
      CHECK(roc.points[i].threshold < roc.points[i - 1].threshold);
    }
  }
}

TEST_CASE("property: AUC is invariant under strictly monotone transforms") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(40), t(40);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
      s[i] = u(gen);
      t[i] = std::exp(3 * s[i]) - 7;
      y[i] = static_cast<int>(i % 3 == 0);
    }
    const Labels labels(y);
    CHECK(auc_rank(s, labels.span()) == doctest::Approx(auc_rank(t, labels.span())).epsilon(1e-12));
  }
}

TEST_CASE("confusion counts use score >= threshold") {
  const std::vector<double> s = {0.5, 0.49, 0.7, 0.1};
  const Labels y({1, 1, 0, 0});
  const auto c = confusion_at(s, y.span(), 0.5);
  CHECK(c.tp == 1);
  CHECK(c.fn == 1);
  CHECK(c.fp == 1);
  CHECK(c.tn == 1);
  CHECK(c.positives() == 2);
}

TEST_CASE("youden point") {
  const std::vector<double> s = {0.9, 0.8, 0.4, 0.3};
  const Labels y({1, 0, 1, 0});
  const auto p = youden_point(roc_curve(s, y.span()));
  CHECK(p.threshold == 0.9);
  CHECK(p.tpr - p.fpr == doctest::Approx(0.5));
}

TEST_CASE("ROC TSV round trip keeps the infinite threshold") {
  const std::vector<double> s = {0.9, 0.8, 0.4, 0.3, 0.3};
  const Labels y({1, 0, 1, 0, 1});
  const auto roc = roc_curve(s, y.span());
  const auto back = roc_from_tsv(roc_to_tsv(roc));
  REQUIRE(back.points.size() == roc.points.size());
  CHECK(std::isinf(back.points[0].threshold));
  for (std::size_t i = 1; i < roc.points.size(); ++i) {
    CHECK(back.points[i].threshold == roc.points[i].threshold);
    CHECK(back.points[i].fpr == roc.points[i].fpr);
    CHECK(back.points[i].tpr == roc.points[i].tpr);
  }
  CHECK(back.auc == doctest::Approx(roc.auc));
}
