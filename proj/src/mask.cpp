#include "xguide/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xguide/error.hpp"

namespace xguide {

BinaryMask::BinaryMask(std::size_t width, std::size_t height, bool fill)
    : width_(width), height_(height), bits_(width * height, fill ? 1 : 0) {}

std::size_t BinaryMask::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::complement() const {
  BinaryMask out(width_, height_);
  for (std::size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = bits_[i] ? 0 : 1;
  return out;
}

bool BinaryMask::subset_of(const BinaryMask& other) const {
  require_same_grid(width_, height_, other.width_, other.height_, "subset_of");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return false;
  return true;
}

ImportanceMap::ImportanceMap(std::size_t width, std::size_t height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != width * height)
    throw ShapeError("importance map has " + std::to_string(values_.size()) + " values for a " +
                     std::to_string(width) + "x" + std::to_string(height) + " grid");
  for (float v : values_)
    if (!(v >= 0.0f) || !std::isfinite(v)) throw NumericError("importance values must be finite and non-negative");
}

float ImportanceMap::max_value() const {
  return values_.empty() ? 0.0f : *std::max_element(values_.begin(), values_.end());
}

void require_same_grid(std::size_t w1, std::size_t h1, std::size_t w2, std::size_t h2, const char* what) {
  if (w1 != w2 || h1 != h2)
    throw ShapeError(std::string(what) + ": grid " + std::to_string(w1) + "x" + std::to_string(h1) +
                     " does not match " + std::to_string(w2) + "x" + std::to_string(h2));
}

}  // namespace xguide
