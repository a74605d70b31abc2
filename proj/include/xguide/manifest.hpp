#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xguide/classifier.hpp"
#include "xguide/mask.hpp"

namespace xguide {

// One row of a manifest CSV (`path,label,mask_path`). Paths are stored
// resolved against the manifest's directory.
struct ManifestEntry {
  std::string id;  // image file stem
  std::filesystem::path image;
  int label = 0;
  std::optional<std::filesystem::path> mask;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<int> labels() const;
};

// Throws DataError naming the file, line and field on malformed input.
Manifest read_manifest(const std::filesystem::path& path);
// Paths are written relative to the manifest's own directory.
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

Dataset load_dataset(const Manifest& manifest);
// Annotation of each entry (nullopt where the row has no mask_path).
std::vector<std::optional<BinaryMask>> load_masks(const Manifest& manifest);

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct DatasetSplit {
  Manifest train, val, test;
};

// Stratified assignment of indices to train/val/test. Each class is shuffled
// with `seed` and cut by largest-remainder rounding of its quotas, so every
// split holds its class share to within one sample. Indices ascending.
std::array<std::vector<std::size_t>, 3> stratified_split_indices(const std::vector<int>& labels,
                                                                 const SplitRatios& ratios, std::uint64_t seed);

DatasetSplit split(const Manifest& manifest, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace xguide
