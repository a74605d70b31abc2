#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "xguide/mask.hpp"
#include "xguide/netpbm.hpp"

namespace xguide {

// Lossless importance sidecar: ASCII header "XIM1 <W> <H>\n" followed by
// W*H little-endian float32 values, row-major.
std::vector<std::uint8_t> encode_importance(const ImportanceMap& map);
ImportanceMap decode_importance(std::span<const std::uint8_t> bytes);
void write_importance(const std::filesystem::path& path, const ImportanceMap& map);
ImportanceMap read_importance(const std::filesystem::path& path);

// Min-max quantization to a 16-bit PGM for viewing; a constant map becomes all zeros.
GrayImage importance_to_pgm(const ImportanceMap& map);

}  // namespace xguide
