#include "xguide/upsample.hpp"

#include <cmath>

#include "xguide/error.hpp"

namespace xguide {

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;
};

// Source coordinate u*(n_src-1)/(n_dst-1), split into neighbours and weight.
Tap source_tap(std::size_t u, std::size_t n_src, std::size_t n_dst) {
  if (n_src == 1 || n_dst == 1) return {0, 0, 0.0};
  if (u == n_dst - 1) return {n_src - 1, n_src - 1, 0.0};
  const double pos = static_cast<double>(u) * static_cast<double>(n_src - 1) / static_cast<double>(n_dst - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = lo + 1 < n_src ? lo + 1 : lo;
  return {lo, hi, pos - static_cast<double>(lo)};
}

}  // namespace

Tensor bilinear_upsample(const Tensor& map, std::size_t target_h, std::size_t target_w) {
  if (map.rank() != 2 && !(map.rank() == 3 && map.dim(0) == 1))
    throw ShapeError("bilinear_upsample expects an H x W map, got " + shape_string(map.shape()));
  const std::size_t h = map.dim(map.rank() - 2), w = map.dim(map.rank() - 1);
  if (h == 0 || w == 0) throw ShapeError("bilinear_upsample: empty source map");
  if (target_h < h || target_w < w)
    throw ShapeError("bilinear_upsample: target " + std::to_string(target_h) + "x" + std::to_string(target_w) +
                     " is smaller than source " + std::to_string(h) + "x" + std::to_string(w));
  Shape out_shape = map.rank() == 2 ? Shape{target_h, target_w} : Shape{1, target_h, target_w};
  if (h == target_h && w == target_w) return Tensor(out_shape, map.storage());

  Tensor out(out_shape);
  const auto src = map.data();
  for (std::size_t v = 0; v < target_h; ++v) {
    const Tap ty = source_tap(v, h, target_h);
    for (std::size_t u = 0; u < target_w; ++u) {
      const Tap tx = source_tap(u, w, target_w);
      const double a = src[ty.lo * w + tx.lo], b = src[ty.lo * w + tx.hi];
      const double c = src[ty.hi * w + tx.lo], d = src[ty.hi * w + tx.hi];
      // Exact weights of zero keep corner and edge samples bit-exact.
      const double top = tx.frac == 0.0 ? a : a + (b - a) * tx.frac;
      const double bottom = tx.frac == 0.0 ? c : c + (d - c) * tx.frac;
      const double val = ty.frac == 0.0 ? top : top + (bottom - top) * ty.frac;
      out[v * target_w + u] = static_cast<float>(val);
    }
  }
  return out;
}

}  // namespace xguide
