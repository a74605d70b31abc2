#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "xguide/mask.hpp"
#include "xguide/tensor.hpp"

namespace xguide {

// Raw grayscale raster as stored in a binary PGM (P5).
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint16_t maxval = 255;  // 255 (8-bit) or 65535 (16-bit, big-endian samples)
  std::vector<std::uint16_t> pixels;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // r, g, b interleaved
};

// Parsers throw ParseError carrying the byte offset of the problem.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
BinaryMask decode_pbm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pbm(const BinaryMask& mask);
std::vector<std::uint8_t> encode_ppm(const RgbImage& image);

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);
BinaryMask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

// 1 x H x W tensor with samples scaled to [0, 1].
Tensor to_tensor(const GrayImage& image);
// Rounds to the nearest level of `maxval`, clamping into [0, 1]. Uses channel 0.
GrayImage from_tensor(const Tensor& chw, std::uint16_t maxval = 255);

Tensor read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Tensor& chw, std::uint16_t maxval = 255);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace xguide
