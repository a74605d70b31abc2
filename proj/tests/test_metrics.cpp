#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "xguide/bootstrap.hpp"
#include "xguide/error.hpp"
#include "xguide/metrics.hpp"
#include "xguide/rng.hpp"

using namespace xguide;

namespace {

BinaryMask block(std::size_t w, std::size_t h, std::size_t x0, std::size_t y0, std::size_t bw, std::size_t bh) {
  BinaryMask m(w, h);
  for (std::size_t y = y0; y < y0 + bh; ++y)
    for (std::size_t x = x0; x < x0 + bw; ++x) m.set(x, y);
  return m;
}

std::vector<ScoredSample> samples(std::initializer_list<double> pos, std::initializer_list<double> neg) {
  std::vector<ScoredSample> s;
  for (double p : pos) s.push_back({p, 1});
  for (double p : neg) s.push_back({p, 0});
  return s;
}

// Fraction of (pos, neg) pairs ordered correctly, ties 1/2.
double pair_auroc(const std::vector<ScoredSample>& s) {
  double good = 0, pairs = 0;
  for (const auto& a : s)
    for (const auto& b : s)
      if (a.label == 1 && b.label == 0) {
        pairs += 1;
        good += a.probability > b.probability ? 1.0 : a.probability == b.probability ? 0.5 : 0.0;
      }
  return good / pairs;
}

}  // namespace

TEST(Overlap, IdenticalAndDisjoint) {
  const auto a = block(6, 6, 1, 1, 2, 2), b = block(6, 6, 4, 4, 2, 2);
  EXPECT_EQ(iou(a, a), 1.0);
  EXPECT_EQ(dsc(a, a), 1.0);
  EXPECT_EQ(iou(a, b), 0.0);
  EXPECT_EQ(dsc(a, b), 0.0);
  EXPECT_EQ(iou(BinaryMask(3, 3), BinaryMask(3, 3)), 1.0);
  EXPECT_THROW((void)iou(a, BinaryMask(5, 6)), ShapeError);
}

TEST(Overlap, ShiftedBlockExample) {
  const auto a = block(5, 5, 1, 1, 2, 2), b = block(5, 5, 2, 1, 2, 2);
  const auto c = overlap_counts(a, b);
  EXPECT_EQ(c.intersection, 2u);
  EXPECT_EQ(c.union_size, 6u);
  EXPECT_DOUBLE_EQ(iou(a, b), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(dsc(a, b), 0.5);
}

TEST(Overlap, DiceIouIdentityOnRandomMasks) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    BinaryMask a(9, 7), b(9, 7);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a.set_index(i, rng.bernoulli(0.3));
      b.set_index(i, rng.bernoulli(0.3));
    }
    const double j = iou(a, b), d = dsc(a, b);
    EXPECT_NEAR(d, 2 * j / (1 + j), 1e-15);
  }
}

TEST(Classification, PerfectScores) {
  const auto s = samples({0.9}, {0.1});
  const auto m = classification_metrics(s, 0.5);
  for (auto v : {m.accuracy, m.sensitivity, m.specificity, m.ppv, m.npv}) EXPECT_EQ(*v, 1.0);
}

TEST(Classification, AllPredictedNegative) {
  const auto s = samples({0.1, 0.2}, {0.1, 0.3, 0.2});
  const auto m = classification_metrics(s, 0.9);
  EXPECT_EQ(*m.sensitivity, 0.0);
  EXPECT_EQ(*m.npv, 3.0 / 5.0);
  EXPECT_FALSE(m.ppv.has_value());
}

TEST(Classification, FourSampleTable) {
  const auto s = samples({0.8, 0.3}, {0.2, 0.1});
  const auto m = classification_metrics(s, 0.5);
  EXPECT_EQ(*m.accuracy, 0.75);
  EXPECT_EQ(*m.sensitivity, 0.5);
  EXPECT_EQ(*m.specificity, 1.0);
  EXPECT_EQ(*m.ppv, 1.0);
  EXPECT_DOUBLE_EQ(*m.npv, 2.0 / 3.0);
  // The cutoff itself counts as positive.
  EXPECT_EQ(classification_metrics(s, 0.3).tp, 2u);
}

TEST(Auroc, WorkedExamples) {
  EXPECT_EQ(auroc(samples({0.9, 0.8}, {0.2, 0.1})), 1.0);
  EXPECT_EQ(auroc(samples({0.8, 0.4}, {0.6, 0.2})), 0.75);
  EXPECT_EQ(auroc(samples({0.5, 0.5}, {0.5, 0.5, 0.5})), 0.5);
  EXPECT_THROW((void)auroc(samples({0.3}, {})), NumericError);
}

TEST(Auroc, MatchesPairEnumerationAndTrapezoid) {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<ScoredSample> s;
    const std::size_t n = 2 + rng.uniform_int(150);
    for (std::size_t i = 0; i < n; ++i)
      s.push_back({std::round(rng.uniform() * 20) / 20, static_cast<int>(i % 2 == 0 || rng.bernoulli(0.3))});
    s[1].label = 0;
    EXPECT_NEAR(auroc(s), pair_auroc(s), 1e-12);
    EXPECT_NEAR(auroc_trapezoid(s), pair_auroc(s), 1e-12);
  }
}

TEST(Auprc, StepwisePrecision) {
  // Ranking pos, neg, pos: AP = 1/2 * 1 + 1/2 * 2/3.
  EXPECT_NEAR(auprc(samples({0.9, 0.5}, {0.7})), 0.5 + 1.0 / 3.0, 1e-15);
  EXPECT_EQ(auprc(samples({0.9, 0.8}, {0.1})), 1.0);
}

TEST(Curves, RocStartsAtOriginAndEndsAtCorner) {
  const auto s = samples({0.8, 0.4}, {0.6, 0.2});
  const auto roc = roc_curve(s);
  ASSERT_EQ(roc.size(), 5u);
  EXPECT_TRUE(std::isinf(roc.front().threshold));
  EXPECT_EQ(roc.front().tpr, 0.0);
  EXPECT_EQ(roc.back().fpr, 1.0);
  EXPECT_EQ(roc.back().tpr, 1.0);
  const auto pr = pr_curve(s);
  ASSERT_EQ(pr.size(), 4u);
  EXPECT_EQ(pr.front().precision, 1.0);
  EXPECT_EQ(pr.back().recall, 1.0);
}

TEST(Cutoff, PerfectScoresGiveZeroDistance) {
  const auto s = samples({0.9, 0.8}, {0.3, 0.1});
  const auto c = select_cutoff(s);
  EXPECT_EQ(c.distance, 0.0);
  EXPECT_GT(c.cutoff, 0.3);
  EXPECT_LT(c.cutoff, 0.8);
}

TEST(Cutoff, TieGoesToSmallerCutoff) {
  // Candidates and their (sens, spec): 0.35 -> (1, 1/2) and 0.8 -> (1/2, 1), both at
  // distance 1/2; 0.65 -> (1/2, 1/2) is farther.
  const auto s = samples({0.9, 0.6}, {0.7, 0.1});
  const auto c = select_cutoff(s);
  EXPECT_DOUBLE_EQ(c.cutoff, 0.35);
  EXPECT_DOUBLE_EQ(c.distance, 0.5);
  EXPECT_EQ(c.sensitivity, 1.0);
  EXPECT_EQ(c.specificity, 0.5);
}

TEST(Cutoff, ShiftInvariance) {
  Rng rng(3);
  std::vector<ScoredSample> s;
  for (int i = 0; i < 40; ++i) s.push_back({rng.uniform(), i % 3 == 0});
  auto shifted = s;
  for (auto& x : shifted) x.probability += 0.25;
  const auto a = select_cutoff(s), b = select_cutoff(shifted);
  EXPECT_NEAR(b.cutoff, a.cutoff + 0.25, 1e-12);
  EXPECT_EQ(a.sensitivity, b.sensitivity);
}

// ---- bootstrap ---------------------------------------------------------------

TEST(Bootstrap, ConstantValuesGiveZeroSe) {
  const std::vector<double> v(30, 0.4);
  const auto r = bootstrap_mean(v, {.resamples = 200, .seed = 1});
  EXPECT_DOUBLE_EQ(r.estimate, 0.4);
  EXPECT_NEAR(r.se, 0.0, 1e-15);
}

TEST(Bootstrap, BernoulliMeanSe) {
  Rng rng(4);
  std::vector<double> v(200);
  for (double& x : v) x = rng.bernoulli(0.8);
  double p = 0;
  for (double x : v) p += x;
  p /= 200;
  const auto r = bootstrap_mean(v, {.resamples = 2000, .seed = 5});
  const double analytic = std::sqrt(p * (1 - p) / 200);
  EXPECT_NEAR(r.se, analytic, 0.15 * analytic);
  const auto r2 = bootstrap_mean(v, {.resamples = 2000, .seed = 6});
  EXPECT_NE(r.se, r2.se);
  EXPECT_NEAR(r2.se, r.se, 0.10 * r.se);
}

TEST(Bootstrap, SeededAndMatchesSerialReference) {
  Rng rng(7);
  std::vector<double> v(57);
  for (double& x : v) x = rng.uniform();
  const BootstrapOptions o{.resamples = 300, .seed = 9};
  const IndexStatistic stat = [&](std::span<const std::size_t> idx) -> std::optional<double> {
    double s = 0;
    for (auto i : idx) s += v[i] * v[i];
    return s / static_cast<double>(idx.size());
  };
  const auto a = bootstrap(v.size(), stat, o), b = bootstrap(v.size(), stat, o);
  const auto c = reference::bootstrap(v.size(), stat, o);
  EXPECT_EQ(a.se, b.se);
  EXPECT_EQ(a.se, c.se);
  EXPECT_EQ(a.estimate, c.estimate);
}

TEST(Bootstrap, SingleResampleAndRedraws) {
  const std::vector<double> v{1, 2, 3};
  EXPECT_EQ(bootstrap_mean(v, {.resamples = 1, .seed = 0}).se, 0.0);
  // Statistic undefined unless index 0 is drawn: redraws are counted.
  const IndexStatistic needs0 = [](std::span<const std::size_t> idx) -> std::optional<double> {
    for (auto i : idx)
      if (i == 0) return 1.0;
    return std::nullopt;
  };
  const auto r = bootstrap(3, needs0, {.resamples = 100, .seed = 2});
  EXPECT_GT(r.redraws, 0u);
  const IndexStatistic never = [](std::span<const std::size_t>) -> std::optional<double> { return std::nullopt; };
  EXPECT_THROW((void)bootstrap(3, never, {.resamples = 10, .seed = 0}), NumericError);
}

TEST(ExplanationQuality, PerfectAndMixed) {
  const auto a = block(4, 4, 0, 0, 2, 2);
  std::vector<FocusSample> perfect{{"a", 1, a, a}, {"b", 1, a, a}};
  const auto r = explanation_quality(perfect, {.resamples = 50, .seed = 1});
  EXPECT_EQ(r.iou.estimate, 1.0);
  EXPECT_EQ(r.iou.se, 0.0);

  const auto b = block(4, 4, 2, 2, 2, 2);
  std::vector<FocusSample> mixed{{"a", 1, a, a}, {"b", 1, b, a}, {"n", 0, b, std::nullopt}, {"u", 1, a, std::nullopt}};
  const auto m = explanation_quality(mixed, {.resamples = 50, .seed = 1});
  ASSERT_EQ(m.rows.size(), 2u);
  EXPECT_EQ(m.iou.estimate, 0.5);
  EXPECT_EQ(m.skipped, 1u);
  double mean = 0;
  for (const auto& row : m.rows) mean += row.dsc;
  EXPECT_DOUBLE_EQ(m.dsc.estimate, mean / 2);

  std::vector<FocusSample> none{{"n", 0, b, std::nullopt}};
  EXPECT_THROW((void)explanation_quality(none, {}), DataError);
}
