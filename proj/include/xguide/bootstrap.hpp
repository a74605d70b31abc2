#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xguide/mask.hpp"
#include "xguide/metrics.hpp"

namespace xguide {

struct BootstrapOptions {
  std::size_t resamples = 1000;
  std::uint64_t seed = 0;
};

struct BootstrapResult {
  double estimate = 0.0;  // statistic on the full sample
  double se = 0.0;        // sd of the resampled statistics, denominator B-1
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
  std::size_t redraws = 0;  // resamples discarded because the statistic was undefined
};

// Statistic evaluated on a resample given as indices into the original data.
// Returns nullopt where undefined (the resample is then redrawn).
using IndexStatistic = std::function<std::optional<double>(std::span<const std::size_t>)>;

// Nonparametric bootstrap over n items. Resample i draws from substream i of
// `seed`, so the result does not depend on the number of threads. At most
// 10*B draws are attempted in total; beyond that NumericError is thrown.
// B == 1 yields SE 0.
BootstrapResult bootstrap(std::size_t n, const IndexStatistic& statistic, const BootstrapOptions& options);

// Bootstrap SE of the mean of `values`.
BootstrapResult bootstrap_mean(std::span<const double> values, const BootstrapOptions& options);

namespace reference {
// Serial loop over resamples with the same stream assignment.
BootstrapResult bootstrap(std::size_t n, const IndexStatistic& statistic, const BootstrapOptions& options);
}  // namespace reference

// ---- explanation quality -------------------------------------------------

struct FocusSample {
  std::string id;
  int label = 1;
  BinaryMask focus;
  std::optional<BinaryMask> annotation;
};

struct ExplanationRow {
  std::string sample_id;
  double iou;
  double dsc;
};

struct EvalReport {
  std::vector<ExplanationRow> rows;
  BootstrapResult iou;
  BootstrapResult dsc;
  std::size_t skipped = 0;  // positives without an annotation
};

// Per-sample IoU/DSC over positive, annotated samples, with the mean and its
// bootstrap SE.
EvalReport explanation_quality(std::span<const FocusSample> samples, const BootstrapOptions& options);

}  // namespace xguide
