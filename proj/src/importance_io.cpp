#include "xguide/importance_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "xguide/error.hpp"

namespace xguide {

std::vector<std::uint8_t> encode_importance(const ImportanceMap& map) {
  const std::string header = "XIM1 " + std::to_string(map.width()) + " " + std::to_string(map.height()) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + 4 * map.size());
  for (float v : map.values()) {
    const auto u = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  return out;
}

ImportanceMap decode_importance(std::span<const std::uint8_t> bytes) {
  const std::string magic = "XIM1 ";
  if (bytes.size() < magic.size() || !std::equal(magic.begin(), magic.end(), bytes.begin()))
    throw ParseError("not an importance sidecar (bad magic)", 0);
  std::size_t pos = magic.size();
  auto number = [&](char terminator, const char* what) {
    const std::size_t start = pos;
    std::size_t v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos] - '0');
      if (v > (1u << 30)) throw ParseError(std::string(what) + " too large", start);
      ++pos;
    }
    if (pos == start) throw ParseError(std::string("expected ") + what, start);
    if (pos >= bytes.size() || bytes[pos] != terminator) throw ParseError("malformed importance header", pos);
    ++pos;
    return v;
  };
  const std::size_t w = number(' ', "width");
  const std::size_t h = number('\n', "height");
  const std::size_t need = 4 * w * h;
  if (bytes.size() - pos != need)
    throw ParseError("importance payload has " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                         std::to_string(need),
                     bytes.size());
  std::vector<float> v(w * h);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint32_t u = 0;
    for (int k = 0; k < 4; ++k) u |= static_cast<std::uint32_t>(bytes[pos + 4 * i + k]) << (8 * k);
    v[i] = std::bit_cast<float>(u);
    if (!(v[i] >= 0.0f) || !std::isfinite(v[i])) throw ParseError("negative or non-finite importance", pos + 4 * i);
  }
  return ImportanceMap(w, h, std::move(v));
}

void write_importance(const std::filesystem::path& path, const ImportanceMap& map) {
  write_file_bytes(path, encode_importance(map));
}

ImportanceMap read_importance(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_importance(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.offset());
  }
}

GrayImage importance_to_pgm(const ImportanceMap& map) {
  GrayImage img{map.width(), map.height(), 65535, std::vector<std::uint16_t>(map.size(), 0)};
  if (map.size() == 0) return img;
  const auto [lo_it, hi_it] = std::minmax_element(map.values().begin(), map.values().end());
  const double lo = *lo_it, hi = *hi_it;
  if (hi <= lo) return img;
  for (std::size_t i = 0; i < map.size(); ++i)
    img.pixels[i] = static_cast<std::uint16_t>(std::lround((map[i] - lo) / (hi - lo) * 65535.0));
  return img;
}

}  // namespace xguide
