#include "xguide/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "xguide/error.hpp"

namespace xguide {

OverlapCounts overlap_counts(const BinaryMask& region, const BinaryMask& annotation) {
  require_same_grid(region.width(), region.height(), annotation.width(), annotation.height(), "overlap");
  OverlapCounts c;
  for (std::size_t i = 0; i < region.size(); ++i) {
    const bool r = region[i], a = annotation[i];
    c.intersection += r && a;
    c.union_size += r || a;
    c.region += r;
    c.annotation += a;
  }
  return c;
}

double iou(const OverlapCounts& c) {
  if (c.union_size == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(c.union_size);
}

double dsc(const OverlapCounts& c) {
  const std::size_t denom = c.region + c.annotation;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.intersection) / static_cast<double>(denom);
}

double iou(const BinaryMask& region, const BinaryMask& annotation) { return iou(overlap_counts(region, annotation)); }
double dsc(const BinaryMask& region, const BinaryMask& annotation) { return dsc(overlap_counts(region, annotation)); }

ClassificationMetrics classification_metrics(std::span<const ScoredSample> scores, double cutoff) {
  ClassificationMetrics m;
  for (const auto& s : scores) {
    const bool pred = s.probability >= cutoff;
    if (s.label == 1) (pred ? m.tp : m.fn)++;
    else (pred ? m.fp : m.tn)++;
  }
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(m.tp + m.tn, scores.size());
  m.sensitivity = ratio(m.tp, m.tp + m.fn);
  m.specificity = ratio(m.tn, m.tn + m.fp);
  m.ppv = ratio(m.tp, m.tp + m.fp);
  m.npv = ratio(m.tn, m.tn + m.fn);
  return m;
}

namespace {

struct ClassCounts {
  std::size_t pos = 0, neg = 0;
};

ClassCounts count_classes(std::span<const ScoredSample> scores, const char* what) {
  ClassCounts c;
  for (const auto& s : scores) (s.label == 1 ? c.pos : c.neg)++;
  if (c.pos == 0 || c.neg == 0) throw NumericError(std::string(what) + " needs both classes");
  return c;
}

// Distinct thresholds descending with cumulative (tp, fp) at "score >= t".
struct Step {
  double threshold;
  std::size_t tp, fp;
};
std::vector<Step> descending_steps(std::span<const ScoredSample> scores) {
  std::vector<ScoredSample> s(scores.begin(), scores.end());
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.probability > b.probability; });
  std::vector<Step> steps;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    (s[i].label == 1 ? tp : fp)++;
    if (i + 1 == s.size() || s[i + 1].probability != s[i].probability) steps.push_back({s[i].probability, tp, fp});
  }
  return steps;
}

}  // namespace

double auroc(std::span<const ScoredSample> scores) {
  const ClassCounts c = count_classes(scores, "AUROC");
  std::vector<ScoredSample> s(scores.begin(), scores.end());
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.probability < b.probability; });
  // Sum of mid-ranks of positives, 1-based ranks.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    while (j < s.size() && s[j].probability == s[i].probability) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (s[k].label == 1) rank_sum += mid;
    i = j;
  }
  const double np = static_cast<double>(c.pos), nn = static_cast<double>(c.neg);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

double auroc_trapezoid(std::span<const ScoredSample> scores) {
  const ClassCounts c = count_classes(scores, "AUROC");
  double area2 = 0.0;  // twice the area, in units of 1/(pos*neg)
  std::size_t prev_tp = 0, prev_fp = 0;
  for (const Step& st : descending_steps(scores)) {
    area2 += static_cast<double>(st.fp - prev_fp) * static_cast<double>(st.tp + prev_tp);
    prev_tp = st.tp;
    prev_fp = st.fp;
  }
  return area2 / (2.0 * static_cast<double>(c.pos) * static_cast<double>(c.neg));
}

double auprc(std::span<const ScoredSample> scores) {
  const ClassCounts c = count_classes(scores, "AUPRC");
  double ap = 0.0;
  std::size_t prev_tp = 0;
  for (const Step& st : descending_steps(scores)) {
    const double precision = static_cast<double>(st.tp) / static_cast<double>(st.tp + st.fp);
    ap += static_cast<double>(st.tp - prev_tp) / static_cast<double>(c.pos) * precision;
    prev_tp = st.tp;
  }
  return ap;
}

std::vector<RocPoint> roc_curve(std::span<const ScoredSample> scores) {
  const ClassCounts c = count_classes(scores, "ROC curve");
  std::vector<RocPoint> out{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  for (const Step& st : descending_steps(scores))
    out.push_back({st.threshold, static_cast<double>(st.fp) / static_cast<double>(c.neg),
                   static_cast<double>(st.tp) / static_cast<double>(c.pos)});
  return out;
}

std::vector<PrPoint> pr_curve(std::span<const ScoredSample> scores) {
  const ClassCounts c = count_classes(scores, "PR curve");
  std::vector<PrPoint> out;
  for (const Step& st : descending_steps(scores))
    out.push_back({st.threshold, static_cast<double>(st.tp) / static_cast<double>(c.pos),
                   static_cast<double>(st.tp) / static_cast<double>(st.tp + st.fp)});
  return out;
}

CutoffChoice select_cutoff(std::span<const ScoredSample> scores) {
  count_classes(scores, "cutoff selection");
  std::vector<double> distinct;
  for (const auto& s : scores) distinct.push_back(s.probability);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  candidates.push_back(std::numeric_limits<double>::infinity());

  std::optional<CutoffChoice> best;
  for (double cut : candidates) {
    const auto m = classification_metrics(scores, cut);
    const double sens = *m.sensitivity, spec = *m.specificity;
    const double d = std::hypot(1.0 - sens, 1.0 - spec);
    if (!best || d < best->distance - 1e-12) best = CutoffChoice{cut, d, sens, spec};
  }
  return *best;
}

}  // namespace xguide
