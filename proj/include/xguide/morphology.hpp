#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "xguide/mask.hpp"

namespace xguide {

// Mirror about the vertical axis: column x moves to width-1-x.
BinaryMask hflip(const BinaryMask& mask);
BinaryMask mask_union(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_intersection(const BinaryMask& a, const BinaryMask& b);

// Offsets (dx, dy) of the discrete disc dx*dx + dy*dy <= r*r.
std::vector<std::pair<int, int>> disc_offsets(int radius);

// Binary dilation by the radius-r disc; neighbours outside the grid are
// ignored. One output row per OpenMP work item, using row prefix counts.
BinaryMask dilate(const BinaryMask& mask, int radius);

namespace reference {
// Direct neighbourhood scan, O(W*H*r^2).
BinaryMask dilate(const BinaryMask& mask, int radius);
}  // namespace reference

}  // namespace xguide
