#include "xguide/bootstrap.hpp"

#include <cmath>
#include <numeric>

#include "xguide/error.hpp"
#include "xguide/rng.hpp"

namespace xguide {

namespace {

void check(std::size_t n, const BootstrapOptions& o) {
  if (n == 0) throw NumericError("bootstrap needs at least one observation");
  if (o.resamples == 0) throw ConfigError("bootstrap needs at least one resample");
}

struct Draw {
  double value = 0.0;
  std::size_t attempts = 0;
  bool ok = false;
};

// Draws resample `index` from its own substream, redrawing while the
// statistic is undefined, at most `cap` attempts.
Draw draw_resample(std::size_t n, const IndexStatistic& stat, std::uint64_t seed, std::size_t index,
                   std::size_t cap) {
  Rng rng = Rng::substream(seed, index);
  std::vector<std::size_t> idx(n);
  Draw d;
  while (d.attempts < cap) {
    ++d.attempts;
    for (auto& v : idx) v = static_cast<std::size_t>(rng.uniform_int(n));
    if (auto s = stat(idx)) {
      d.value = *s;
      d.ok = true;
      break;
    }
  }
  return d;
}

BootstrapResult finish(std::size_t n, const IndexStatistic& stat, const BootstrapOptions& o,
                       const std::vector<Draw>& draws) {
  BootstrapResult r;
  r.resamples = o.resamples;
  r.seed = o.seed;
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto full = stat(all);
  if (!full) throw NumericError("bootstrap statistic undefined on the full sample");
  r.estimate = *full;

  std::size_t attempts = 0;
  for (const Draw& d : draws) {
    attempts += d.attempts;
    if (!d.ok) throw NumericError("bootstrap statistic undefined on too many resamples");
  }
  if (attempts > 10 * o.resamples) throw NumericError("bootstrap exceeded 10*B resample attempts");
  r.redraws = attempts - o.resamples;
  if (o.resamples == 1) return r;

  double mean = 0.0;
  for (const Draw& d : draws) mean += d.value;
  mean /= static_cast<double>(draws.size());
  double ss = 0.0;
  for (const Draw& d : draws) ss += (d.value - mean) * (d.value - mean);
  r.se = std::sqrt(ss / static_cast<double>(draws.size() - 1));
  return r;
}

}  // namespace

BootstrapResult bootstrap(std::size_t n, const IndexStatistic& statistic, const BootstrapOptions& options) {
  check(n, options);
  const std::size_t B = options.resamples;
  std::vector<Draw> draws(B);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(B); ++i)
    draws[static_cast<std::size_t>(i)] = draw_resample(n, statistic, options.seed, static_cast<std::size_t>(i), 10 * B);
  return finish(n, statistic, options, draws);
}

namespace reference {

BootstrapResult bootstrap(std::size_t n, const IndexStatistic& statistic, const BootstrapOptions& options) {
  check(n, options);
  std::vector<Draw> draws;
  for (std::size_t i = 0; i < options.resamples; ++i)
    draws.push_back(draw_resample(n, statistic, options.seed, i, 10 * options.resamples));
  return finish(n, statistic, options, draws);
}

}  // namespace reference

BootstrapResult bootstrap_mean(std::span<const double> values, const BootstrapOptions& options) {
  return bootstrap(
      values.size(),
      [values](std::span<const std::size_t> idx) -> std::optional<double> {
        double s = 0.0;
        for (std::size_t i : idx) s += values[i];
        return s / static_cast<double>(idx.size());
      },
      options);
}

EvalReport explanation_quality(std::span<const FocusSample> samples, const BootstrapOptions& options) {
  EvalReport report;
  std::vector<double> ious, dscs;
  for (const FocusSample& s : samples) {
    if (s.label != 1) continue;
    if (!s.annotation) {
      ++report.skipped;
      continue;
    }
    const OverlapCounts c = overlap_counts(s.focus, *s.annotation);
    report.rows.push_back({s.id, iou(c), dsc(c)});
    ious.push_back(iou(c));
    dscs.push_back(dsc(c));
  }
  if (report.rows.empty()) throw DataError("no annotated positive samples to evaluate");
  report.iou = bootstrap_mean(ious, options);
  report.dsc = bootstrap_mean(dscs, options);
  return report;
}

}  // namespace xguide
