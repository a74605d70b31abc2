#include "xguide/morphology.hpp"

#include <algorithm>
#include <cmath>

#include "xguide/error.hpp"

namespace xguide {

BinaryMask hflip(const BinaryMask& mask) {
  const std::size_t W = mask.width(), H = mask.height();
  BinaryMask out(W, H);
  for (std::size_t y = 0; y < H; ++y)
    for (std::size_t x = 0; x < W; ++x) out.set(W - 1 - x, y, mask.get(x, y));
  return out;
}

BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b) {
  require_same_grid(a.width(), a.height(), b.width(), b.height(), "mask union");
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.set_index(i, a[i] || b[i]);
  return out;
}

BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  require_same_grid(a.width(), a.height(), b.width(), b.height(), "mask intersection");
  BinaryMask out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.set_index(i, a[i] && b[i]);
  return out;
}

namespace {

// Half-width of the disc on each row offset dy in [-r, r].
std::vector<int> disc_half_widths(int r) {
  std::vector<int> half(static_cast<std::size_t>(2 * r + 1));
  for (int dy = -r; dy <= r; ++dy) {
    int w = 0;
    while ((w + 1) * (w + 1) + dy * dy <= r * r) ++w;
    half[static_cast<std::size_t>(dy + r)] = w;
  }
  return half;
}

}  // namespace

std::vector<std::pair<int, int>> disc_offsets(int radius) {
  if (radius < 0) throw ConfigError("dilation radius must be >= 0");
  std::vector<std::pair<int, int>> out;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) out.emplace_back(dx, dy);
  return out;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) throw ConfigError("dilation radius must be >= 0");
  if (radius == 0) return mask;
  const auto W = static_cast<std::ptrdiff_t>(mask.width());
  const auto H = static_cast<std::ptrdiff_t>(mask.height());
  const std::vector<int> half = disc_half_widths(radius);

  // prefix[y][x] = number of set bits in row y strictly left of x.
  std::vector<std::uint32_t> prefix(static_cast<std::size_t>(H * (W + 1)), 0);
  for (std::ptrdiff_t y = 0; y < H; ++y) {
    std::uint32_t* p = prefix.data() + y * (W + 1);
    for (std::ptrdiff_t x = 0; x < W; ++x)
      p[x + 1] = p[x] + (mask.get(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) ? 1u : 0u);
  }

  BinaryMask out(mask.width(), mask.height());
#pragma omp parallel for schedule(static) if (W * H > 16384)
  for (std::ptrdiff_t y = 0; y < H; ++y) {
    for (std::ptrdiff_t x = 0; x < W; ++x) {
      bool hit = false;
      for (int dy = -radius; dy <= radius && !hit; ++dy) {
        const std::ptrdiff_t yy = y + dy;
        if (yy < 0 || yy >= H) continue;
        const int hw = half[static_cast<std::size_t>(dy + radius)];
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, x - hw);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(W, x + hw + 1);
        const std::uint32_t* p = prefix.data() + yy * (W + 1);
        hit = p[hi] > p[lo];
      }
      if (hit) out.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
    }
  }
  return out;
}

namespace reference {

BinaryMask dilate(const BinaryMask& mask, int radius) {
  const auto offsets = disc_offsets(radius);
  const auto W = static_cast<std::ptrdiff_t>(mask.width());
  const auto H = static_cast<std::ptrdiff_t>(mask.height());
  BinaryMask out(mask.width(), mask.height());
  for (std::ptrdiff_t y = 0; y < H; ++y)
    for (std::ptrdiff_t x = 0; x < W; ++x)
      for (const auto& [dx, dy] : offsets) {
        const std::ptrdiff_t xx = x + dx, yy = y + dy;
        if (xx < 0 || yy < 0 || xx >= W || yy >= H) continue;
        if (mask.get(static_cast<std::size_t>(xx), static_cast<std::size_t>(yy))) {
          out.set(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
          break;
        }
      }
  return out;
}

}  // namespace reference

}  // namespace xguide
