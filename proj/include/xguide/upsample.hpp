#pragma once

#include <cstddef>

#include "xguide/tensor.hpp"

namespace xguide {

// Align-corners bilinear upsampling of a 2-D map (shape H x W, or 1 x H x W)
// to target_h x target_w. Output has the same rank as the input.
// Throws ShapeError if the target is smaller than the source in either axis.
Tensor bilinear_upsample(const Tensor& map, std::size_t target_h, std::size_t target_w);

}  // namespace xguide
