#include "xguide/kernels.hpp"

#include <algorithm>

namespace xguide::kernels {

namespace {

// Output rows/columns y for which y + k - 1 lies inside [0, n).
struct Range {
  std::size_t begin;
  std::size_t end;
};
inline Range valid_range(std::size_t k, std::size_t n) {
  const std::size_t begin = k == 0 ? 1 : 0;
  const std::size_t end = k == 2 ? (n == 0 ? 0 : n - 1) : n;
  return {std::min(begin, end), end};
}

}  // namespace

void conv3x3_forward(std::span<const float> in, Dims dims, std::span<const float> weight,
                     std::span<const float> bias, std::size_t filters, std::span<float> out) {
  const std::size_t H = dims.height, W = dims.width, P = dims.plane();
  const auto nf = static_cast<std::ptrdiff_t>(filters);
#pragma omp parallel for schedule(static) if (filters * dims.size() > 32768)
  for (std::ptrdiff_t fi = 0; fi < nf; ++fi) {
    const auto f = static_cast<std::size_t>(fi);
    float* o = out.data() + f * P;
    std::fill(o, o + P, bias[f]);
    for (std::size_t c = 0; c < dims.channels; ++c) {
      const float* src = in.data() + c * P;
      const float* w = weight.data() + (f * dims.channels + c) * 9;
      for (std::size_t ky = 0; ky < 3; ++ky) {
        const Range ry = valid_range(ky, H);
        for (std::size_t kx = 0; kx < 3; ++kx) {
          const Range rx = valid_range(kx, W);
          const float wk = w[ky * 3 + kx];
          for (std::size_t y = ry.begin; y < ry.end; ++y) {
            float* orow = o + y * W;
            const float* irow = src + (y + ky - 1) * W;
            for (std::size_t x = rx.begin; x < rx.end; ++x) orow[x] += wk * irow[x + kx - 1];
          }
        }
      }
    }
  }
}

void conv3x3_backward_input(std::span<const float> grad_out, Dims dims, std::span<const float> weight,
                            std::size_t filters, std::span<float> grad_in) {
  const std::size_t H = dims.height, W = dims.width, P = dims.plane();
  const auto nc = static_cast<std::ptrdiff_t>(dims.channels);
#pragma omp parallel for schedule(static) if (filters * dims.size() > 32768)
  for (std::ptrdiff_t ci = 0; ci < nc; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    float* g = grad_in.data() + c * P;
    std::fill(g, g + P, 0.0f);
    for (std::size_t f = 0; f < filters; ++f) {
      const float* go = grad_out.data() + f * P;
      const float* w = weight.data() + (f * dims.channels + c) * 9;
      for (std::size_t ky = 0; ky < 3; ++ky) {
        // Input row iy receives output row y = iy - ky + 1.
        const Range ry = valid_range(2 - ky, H);
        for (std::size_t kx = 0; kx < 3; ++kx) {
          const Range rx = valid_range(2 - kx, W);
          const float wk = w[ky * 3 + kx];
          for (std::size_t iy = ry.begin; iy < ry.end; ++iy) {
            float* grow = g + iy * W;
            const float* orow = go + (iy + 1 - ky) * W;
            for (std::size_t ix = rx.begin; ix < rx.end; ++ix) grow[ix] += wk * orow[ix + 1 - kx];
          }
        }
      }
    }
  }
}

void conv3x3_backward_params(std::span<const float> in, Dims dims, std::span<const float> grad_out,
                             std::size_t filters, std::span<float> grad_weight, std::span<float> grad_bias) {
  const std::size_t H = dims.height, W = dims.width, P = dims.plane();
  const auto nf = static_cast<std::ptrdiff_t>(filters);
#pragma omp parallel for schedule(static) if (filters * dims.size() > 32768)
  for (std::ptrdiff_t fi = 0; fi < nf; ++fi) {
    const auto f = static_cast<std::size_t>(fi);
    const float* go = grad_out.data() + f * P;
    double bsum = 0.0;
    for (std::size_t i = 0; i < P; ++i) bsum += go[i];
    grad_bias[f] = static_cast<float>(bsum);
    for (std::size_t c = 0; c < dims.channels; ++c) {
      const float* src = in.data() + c * P;
      for (std::size_t ky = 0; ky < 3; ++ky) {
        const Range ry = valid_range(ky, H);
        for (std::size_t kx = 0; kx < 3; ++kx) {
          const Range rx = valid_range(kx, W);
          double acc = 0.0;
          for (std::size_t y = ry.begin; y < ry.end; ++y) {
            const float* orow = go + y * W;
            const float* irow = src + (y + ky - 1) * W;
            for (std::size_t x = rx.begin; x < rx.end; ++x)
              acc += static_cast<double>(orow[x]) * static_cast<double>(irow[x + kx - 1]);
          }
          grad_weight[((f * dims.channels + c) * 3 + ky) * 3 + kx] = static_cast<float>(acc);
        }
      }
    }
  }
}

void maxpool2x2_forward(std::span<const float> in, Dims dims, std::span<float> out,
                        std::span<std::uint32_t> argmax) {
  const std::size_t W = dims.width, P = dims.plane();
  const std::size_t oh = dims.height / 2, ow = dims.width / 2;
  const auto nc = static_cast<std::ptrdiff_t>(dims.channels);
#pragma omp parallel for schedule(static) if (dims.size() > 65536)
  for (std::ptrdiff_t ci = 0; ci < nc; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    const float* src = in.data() + c * P;
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t best = 2 * y * W + 2 * x;
        const std::size_t cand[3] = {best + 1, best + W, best + W + 1};
        for (std::size_t k : cand)
          if (src[k] > src[best]) best = k;
        const std::size_t o = (c * oh + y) * ow + x;
        out[o] = src[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
}

void maxpool2x2_backward(std::span<const float> grad_out, Dims dims, std::span<const std::uint32_t> argmax,
                         std::span<float> grad_in) {
  const std::size_t P = dims.plane();
  const std::size_t op = (dims.height / 2) * (dims.width / 2);
  const auto nc = static_cast<std::ptrdiff_t>(dims.channels);
#pragma omp parallel for schedule(static) if (dims.size() > 65536)
  for (std::ptrdiff_t ci = 0; ci < nc; ++ci) {
    const auto c = static_cast<std::size_t>(ci);
    float* g = grad_in.data() + c * P;
    std::fill(g, g + P, 0.0f);
    for (std::size_t i = 0; i < op; ++i) g[argmax[c * op + i]] += grad_out[c * op + i];
  }
}

void relu_forward(std::span<const float> in, std::span<float> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0f ? in[i] : 0.0f;
}

void relu_backward(std::span<const float> pre_activation, std::span<const float> grad_out,
                   std::span<float> grad_in) {
  for (std::size_t i = 0; i < grad_out.size(); ++i) grad_in[i] = pre_activation[i] > 0.0f ? grad_out[i] : 0.0f;
}

namespace reference {

namespace {
inline bool inside(std::ptrdiff_t v, std::size_t n) { return v >= 0 && static_cast<std::size_t>(v) < n; }
}  // namespace

void conv3x3_forward(std::span<const float> in, Dims dims, std::span<const float> weight,
                     std::span<const float> bias, std::size_t filters, std::span<float> out) {
  const std::size_t C = dims.channels, H = dims.height, W = dims.width;
  for (std::size_t f = 0; f < filters; ++f)
    for (std::size_t y = 0; y < H; ++y)
      for (std::size_t x = 0; x < W; ++x) {
        float acc = bias[f];
        for (std::size_t c = 0; c < C; ++c)
          for (std::size_t ky = 0; ky < 3; ++ky)
            for (std::size_t kx = 0; kx < 3; ++kx) {
              const auto iy = static_cast<std::ptrdiff_t>(y + ky) - 1;
              const auto ix = static_cast<std::ptrdiff_t>(x + kx) - 1;
              if (!inside(iy, H) || !inside(ix, W)) continue;
              acc += weight[((f * C + c) * 3 + ky) * 3 + kx] *
                     in[(c * H + static_cast<std::size_t>(iy)) * W + static_cast<std::size_t>(ix)];
            }
        out[(f * H + y) * W + x] = acc;
      }
}

void conv3x3_backward_input(std::span<const float> grad_out, Dims dims, std::span<const float> weight,
                            std::size_t filters, std::span<float> grad_in) {
  const std::size_t C = dims.channels, H = dims.height, W = dims.width;
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t iy = 0; iy < H; ++iy)
      for (std::size_t ix = 0; ix < W; ++ix) {
        float acc = 0.0f;
        for (std::size_t f = 0; f < filters; ++f)
          for (std::size_t ky = 0; ky < 3; ++ky)
            for (std::size_t kx = 0; kx < 3; ++kx) {
              const auto y = static_cast<std::ptrdiff_t>(iy + 1) - static_cast<std::ptrdiff_t>(ky);
              const auto x = static_cast<std::ptrdiff_t>(ix + 1) - static_cast<std::ptrdiff_t>(kx);
              if (!inside(y, H) || !inside(x, W)) continue;
              acc += weight[((f * C + c) * 3 + ky) * 3 + kx] *
                     grad_out[(f * H + static_cast<std::size_t>(y)) * W + static_cast<std::size_t>(x)];
            }
        grad_in[(c * H + iy) * W + ix] = acc;
      }
}

void conv3x3_backward_params(std::span<const float> in, Dims dims, std::span<const float> grad_out,
                             std::size_t filters, std::span<float> grad_weight, std::span<float> grad_bias) {
  const std::size_t C = dims.channels, H = dims.height, W = dims.width;
  for (std::size_t f = 0; f < filters; ++f) {
    double bsum = 0.0;
    for (std::size_t i = 0; i < H * W; ++i) bsum += grad_out[f * H * W + i];
    grad_bias[f] = static_cast<float>(bsum);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t ky = 0; ky < 3; ++ky)
        for (std::size_t kx = 0; kx < 3; ++kx) {
          double acc = 0.0;
          for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x) {
              const auto iy = static_cast<std::ptrdiff_t>(y + ky) - 1;
              const auto ix = static_cast<std::ptrdiff_t>(x + kx) - 1;
              if (!inside(iy, H) || !inside(ix, W)) continue;
              acc += static_cast<double>(grad_out[(f * H + y) * W + x]) *
                     static_cast<double>(in[(c * H + static_cast<std::size_t>(iy)) * W + static_cast<std::size_t>(ix)]);
            }
          grad_weight[((f * C + c) * 3 + ky) * 3 + kx] = static_cast<float>(acc);
        }
  }
}

void maxpool2x2_forward(std::span<const float> in, Dims dims, std::span<float> out,
                        std::span<std::uint32_t> argmax) {
  const std::size_t W = dims.width, P = dims.plane();
  const std::size_t oh = dims.height / 2, ow = dims.width / 2;
  for (std::size_t c = 0; c < dims.channels; ++c)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t best = 2 * y * W + 2 * x;
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t k = (2 * y + dy) * W + 2 * x + dx;
            if (in[c * P + k] > in[c * P + best]) best = k;
          }
        out[(c * oh + y) * ow + x] = in[c * P + best];
        argmax[(c * oh + y) * ow + x] = static_cast<std::uint32_t>(best);
      }
}

void maxpool2x2_backward(std::span<const float> grad_out, Dims dims, std::span<const std::uint32_t> argmax,
                         std::span<float> grad_in) {
  const std::size_t P = dims.plane();
  const std::size_t op = (dims.height / 2) * (dims.width / 2);
  std::fill(grad_in.begin(), grad_in.begin() + static_cast<std::ptrdiff_t>(dims.size()), 0.0f);
  for (std::size_t c = 0; c < dims.channels; ++c)
    for (std::size_t i = 0; i < op; ++i) grad_in[c * P + argmax[c * op + i]] += grad_out[c * op + i];
}

}  // namespace reference

}  // namespace xguide::kernels
