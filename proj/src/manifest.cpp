#include "xguide/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "xguide/error.hpp"
#include "xguide/netpbm.hpp"
#include "xguide/rng.hpp"

namespace xguide {

namespace fs = std::filesystem;

std::vector<int> Manifest::labels() const {
  std::vector<int> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.label);
  return out;
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  const std::string where = path.string();
  std::string line;
  if (!std::getline(in, line)) throw DataError(where + ": empty manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "path,label,mask_path")
    throw DataError(where + ": line 1: header must be 'path,label,mask_path', got '" + line + "'");

  Manifest m;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    const std::string at = where + ": line " + std::to_string(lineno);
    if (fields.size() != 3) throw DataError(at + ": expected 3 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) throw DataError(at + ": field 'path' is empty");
    if (fields[1] != "0" && fields[1] != "1")
      throw DataError(at + ": field 'label' must be 0 or 1, got '" + fields[1] + "'");
    ManifestEntry e;
    e.image = base / fields[0];
    e.id = fs::path(fields[0]).stem().string();
    e.label = fields[1] == "1" ? 1 : 0;
    if (!fields[2].empty()) e.mask = base / fields[2];
    m.entries.push_back(std::move(e));
  }
  return m;
}

void write_manifest(const fs::path& path, const Manifest& manifest) {
  const fs::path base = fs::absolute(path).parent_path();
  auto rel = [&](const fs::path& p) { return fs::absolute(p).lexically_relative(base).generic_string(); };
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << "path,label,mask_path\n";
  for (const auto& e : manifest.entries) out << rel(e.image) << ',' << e.label << ',' << (e.mask ? rel(*e.mask) : "") << '\n';
  if (!out) throw DataError("failed writing manifest " + path.string());
}

Dataset load_dataset(const Manifest& manifest) {
  Dataset d;
  for (const auto& e : manifest.entries) {
    d.images.push_back(read_image(e.image));
    d.labels.push_back(e.label);
  }
  return d;
}

std::vector<std::optional<BinaryMask>> load_masks(const Manifest& manifest) {
  std::vector<std::optional<BinaryMask>> out;
  for (const auto& e : manifest.entries) {
    if (e.mask) out.emplace_back(read_mask(*e.mask));
    else out.emplace_back(std::nullopt);
  }
  return out;
}

std::array<std::vector<std::size_t>, 3> stratified_split_indices(const std::vector<int>& labels,
                                                                 const SplitRatios& ratios, std::uint64_t seed) {
  const std::array<double, 3> r{ratios.train, ratios.val, ratios.test};
  for (double v : r)
    if (!(v >= 0.0)) throw ConfigError("split ratios must be non-negative");
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
  const auto used = static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [](double v) { return v > 0.0; }));
  if (labels.size() < used)
    throw DataError("cannot split " + std::to_string(labels.size()) + " samples into " + std::to_string(used) +
                    " non-empty parts");

  std::array<std::vector<std::size_t>, 3> out;
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(i);
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(cls));
    rng.shuffle(idx);

    const double n = static_cast<double>(idx.size());
    std::array<std::size_t, 3> count{};
    std::array<double, 3> frac{};
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double q = n * r[j];
      count[j] = static_cast<std::size_t>(std::floor(q + 1e-9));
      frac[j] = q - static_cast<double>(count[j]);
      assigned += count[j];
    }
    while (assigned < idx.size()) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < 3; ++j)
        if (frac[j] > frac[best] + 1e-12) best = j;
      ++count[best];
      frac[best] = -1.0;
      ++assigned;
    }
    std::size_t pos = 0;
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < count[j]; ++k) out[j].push_back(idx[pos++]);
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

DatasetSplit split(const Manifest& manifest, const SplitRatios& ratios, std::uint64_t seed) {
  const auto parts = stratified_split_indices(manifest.labels(), ratios, seed);
  DatasetSplit s;
  Manifest* dst[3] = {&s.train, &s.val, &s.test};
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i : parts[j]) dst[j]->entries.push_back(manifest.entries[i]);
  return s;
}

}  // namespace xguide
