// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "xguide/bootstrap.hpp"
#include "xguide/kernels.hpp"
#include "xguide/morphology.hpp"
#include "xguide/rng.hpp"

namespace {

using namespace xguide;

std::vector<float> random_floats(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return v;
}

template <bool Parallel>
void BM_ConvForward(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const kernels::Dims d{8, side, side};
  const std::size_t filters = 16;
  const auto in = random_floats(d.size(), 1), w = random_floats(filters * d.channels * 9, 2),
             b = random_floats(filters, 3);
  std::vector<float> out(filters * d.plane());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::conv3x3_forward(in, d, w, b, filters, out);
    else kernels::reference::conv3x3_forward(in, d, w, b, filters, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ConvForward<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_ConvForward<true>)->Arg(32)->Arg(64);

template <bool Parallel>
void BM_ConvBackwardInput(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const kernels::Dims d{8, side, side};
  const std::size_t filters = 16;
  const auto go = random_floats(filters * d.plane(), 1), w = random_floats(filters * d.channels * 9, 2);
  std::vector<float> gi(d.size());
  for (auto _ : state) {
    if constexpr (Parallel) kernels::conv3x3_backward_input(go, d, w, filters, gi);
    else kernels::reference::conv3x3_backward_input(go, d, w, filters, gi);
    benchmark::DoNotOptimize(gi.data());
  }
}
BENCHMARK(BM_ConvBackwardInput<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_ConvBackwardInput<true>)->Arg(32)->Arg(64);

template <bool Parallel>
void BM_ConvBackwardParams(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const kernels::Dims d{8, side, side};
  const std::size_t filters = 16;
  const auto in = random_floats(d.size(), 1), go = random_floats(filters * d.plane(), 2);
  std::vector<float> gw(filters * d.channels * 9), gb(filters);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::conv3x3_backward_params(in, d, go, filters, gw, gb);
    else kernels::reference::conv3x3_backward_params(in, d, go, filters, gw, gb);
    benchmark::DoNotOptimize(gw.data());
  }
}
BENCHMARK(BM_ConvBackwardParams<false>)->Arg(32)->Arg(64);
BENCHMARK(BM_ConvBackwardParams<true>)->Arg(32)->Arg(64);

template <bool Parallel>
void BM_Dilate(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  BinaryMask m(side, side);
  Rng rng(5);
  for (std::size_t i = 0; i < m.size(); ++i) m.set_index(i, rng.bernoulli(0.02));
  for (auto _ : state) {
    BinaryMask out = Parallel ? dilate(m, 7) : reference::dilate(m, 7);
    benchmark::DoNotOptimize(out.bits().data());
  }
}
BENCHMARK(BM_Dilate<false>)->Arg(64)->Arg(256);
BENCHMARK(BM_Dilate<true>)->Arg(64)->Arg(256);

template <bool Parallel>
void BM_Bootstrap(benchmark::State& state) {
  std::vector<double> v(200);
  Rng rng(9);
  for (double& x : v) x = rng.uniform();
  const IndexStatistic mean = [&v](std::span<const std::size_t> idx) -> std::optional<double> {
    double s = 0.0;
    for (std::size_t i : idx) s += v[i];
    return s / static_cast<double>(idx.size());
  };
  for (auto _ : state) {
    const auto r = Parallel ? bootstrap(v.size(), mean, {1000, 1}) : reference::bootstrap(v.size(), mean, {1000, 1});
    benchmark::DoNotOptimize(r.se);
  }
}
BENCHMARK(BM_Bootstrap<false>);
BENCHMARK(BM_Bootstrap<true>);

}  // namespace

BENCHMARK_MAIN();
