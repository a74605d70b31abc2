#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xguide/tensor.hpp"

namespace xguide {

// W x H grid of bits, row-major (index = y * width + x). Used for lesion
// annotations, templates and focus regions alike.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t width, std::size_t height, bool fill = false);

  static BinaryMask full(std::size_t width, std::size_t height) { return BinaryMask(width, height, true); }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool get(std::size_t x, std::size_t y) const { return bits_[y * width_ + x] != 0; }
  void set(std::size_t x, std::size_t y, bool v = true) { bits_[y * width_ + x] = v ? 1 : 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set_index(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

  std::size_t popcount() const;
  bool empty_region() const { return popcount() == 0; }
  BinaryMask complement() const;
  // True when every set bit of *this is set in `other`.
  bool subset_of(const BinaryMask& other) const;

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Non-negative per-pixel attribution on the input grid.
class ImportanceMap {
 public:
  ImportanceMap() = default;
  ImportanceMap(std::size_t width, std::size_t height, std::vector<float> values);
  ImportanceMap(std::size_t width, std::size_t height) : ImportanceMap(width, height, std::vector<float>(width * height)) {}

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  float at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }
  float operator[](std::size_t i) const { return values_[i]; }
  const std::vector<float>& values() const { return values_; }

  float max_value() const;

  friend bool operator==(const ImportanceMap&, const ImportanceMap&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<float> values_;
};

// Throws ShapeError when the grids differ.
void require_same_grid(std::size_t w1, std::size_t h1, std::size_t w2, std::size_t h2, const char* what);

}  // namespace xguide
