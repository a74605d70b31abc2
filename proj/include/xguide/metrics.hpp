#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "xguide/mask.hpp"

namespace xguide {

// ---- explanation overlap -------------------------------------------------

struct OverlapCounts {
  std::size_t intersection = 0;
  std::size_t union_size = 0;
  std::size_t region = 0;      // |R|
  std::size_t annotation = 0;  // |A|
};

OverlapCounts overlap_counts(const BinaryMask& region, const BinaryMask& annotation);

// |R & A| / |R | A|; 1 when both masks are empty.
double iou(const BinaryMask& region, const BinaryMask& annotation);
double iou(const OverlapCounts& c);
// 2|R & A| / (|R| + |A|); 1 when both masks are empty.
double dsc(const BinaryMask& region, const BinaryMask& annotation);
double dsc(const OverlapCounts& c);

// ---- classification ------------------------------------------------------

struct ScoredSample {
  double probability;
  int label;
};

// Confusion-matrix metrics; "positive" means probability >= cutoff. A metric
// whose denominator is zero is left empty.
struct ClassificationMetrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> accuracy;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> ppv;
  std::optional<double> npv;
};

ClassificationMetrics classification_metrics(std::span<const ScoredSample> scores, double cutoff);

// Mann-Whitney U / (n_pos * n_neg), ties counted 1/2. Throws NumericError
// unless both classes are present.
double auroc(std::span<const ScoredSample> scores);
// Area under the trapezoidal ROC curve; equals auroc() up to rounding.
double auroc_trapezoid(std::span<const ScoredSample> scores);
// Average precision: sum over thresholds of (recall_k - recall_{k-1}) * precision_k.
double auprc(std::span<const ScoredSample> scores);

struct RocPoint {
  double threshold, fpr, tpr;
};
struct PrPoint {
  double threshold, recall, precision;
};
// One point per distinct score, thresholds descending; the ROC curve starts
// at (+inf, 0, 0).
std::vector<RocPoint> roc_curve(std::span<const ScoredSample> scores);
std::vector<PrPoint> pr_curve(std::span<const ScoredSample> scores);

struct CutoffChoice {
  double cutoff;
  double distance;  // to the (FPR 0, TPR 1) corner
  double sensitivity;
  double specificity;
};

// Candidate cutoffs are -inf, midpoints between adjacent distinct scores, and
// +inf; returns the one closest to the ROC corner, ties to the smaller cutoff.
CutoffChoice select_cutoff(std::span<const ScoredSample> scores);

}  // namespace xguide
