#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "xguide/model.hpp"

namespace xguide {

// Binary model checkpoint.
//
//   "XGD1"                                  magic, 4 bytes
//   payload:
//     u32 field_count
//     field_count x { u16 tag, i64 value }  architecture, little-endian
//     u64 scalar_count
//     scalar_count x f32                    parameters in declaration order
//     [u64 n, n x f32]                      normalization offset, when tag 6 is 1
//   u64 checksum                            FNV-1a 64 of the payload bytes
//
// Tags: 1 channels, 2 height, 3 width, 4 head kind, 5 block count, and for
// block b: 16+3b filters, 17+3b relu flag, 18+3b pool flag. Tags 6 (offset
// present) and 7 (scale as f32 bits) appear only for a normalized model.
std::vector<std::uint8_t> encode_checkpoint(const Model& model);
Model decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Model& model);
Model load_checkpoint(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

}  // namespace xguide
