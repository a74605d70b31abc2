#include "xguide/netpbm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "xguide/error.hpp"

namespace xguide {

namespace {

class HeaderParser {
 public:
  explicit HeaderParser(std::span<const std::uint8_t> bytes) : b_(bytes) {}

  void expect_magic(char kind) {
    if (b_.empty()) throw ParseError("empty file", 0);
    if (b_.size() < 2 || b_[0] != 'P' || b_[1] != static_cast<std::uint8_t>(kind))
      throw ParseError(std::string("wrong magic, expected P") + kind, 0);
    pos_ = 2;
  }

  std::size_t number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t v = 0;
    while (pos_ < b_.size() && b_[pos_] >= '0' && b_[pos_] <= '9') {
      v = v * 10 + (b_[pos_] - '0');
      if (v > (1u << 30)) throw ParseError(std::string(what) + " too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("expected ") + what, start);
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  void end_header() {
    if (pos_ >= b_.size() || !is_space(b_[pos_])) throw ParseError("missing whitespace after header", pos_);
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  static bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (is_space(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

void append(std::vector<std::uint8_t>& out, const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }

void require_payload(std::span<const std::uint8_t> bytes, std::size_t start, std::size_t need) {
  if (bytes.size() - start < need)
    throw ParseError("truncated raster: need " + std::to_string(need) + " bytes, have " +
                         std::to_string(bytes.size() - start),
                     bytes.size());
}

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  HeaderParser p(bytes);
  p.expect_magic('5');
  GrayImage img;
  img.width = p.number("width");
  img.height = p.number("height");
  const std::size_t maxval_at = p.pos();
  const std::size_t maxval = p.number("maxval");
  if (maxval != 255 && maxval != 65535) throw ParseError("unsupported maxval " + std::to_string(maxval), maxval_at);
  img.maxval = static_cast<std::uint16_t>(maxval);
  if (img.width == 0 || img.height == 0) throw ParseError("zero image extent", maxval_at);
  p.end_header();
  const std::size_t n = img.width * img.height;
  const std::size_t bps = maxval > 255 ? 2 : 1;
  require_payload(bytes, p.pos(), n * bps);
  img.pixels.resize(n);
  const std::uint8_t* r = bytes.data() + p.pos();
  for (std::size_t i = 0; i < n; ++i)
    img.pixels[i] = bps == 2 ? static_cast<std::uint16_t>((r[2 * i] << 8) | r[2 * i + 1]) : r[i];
  for (std::size_t i = 0; i < n; ++i)
    if (img.pixels[i] > img.maxval) throw ParseError("sample exceeds maxval", p.pos() + i * bps);
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  if (img.maxval != 255 && img.maxval != 65535) throw ConfigError("PGM maxval must be 255 or 65535");
  if (img.pixels.size() != img.width * img.height) throw ShapeError("PGM pixel count does not match extents");
  std::vector<std::uint8_t> out;
  append(out, "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" +
                  std::to_string(img.maxval) + "\n");
  for (std::uint16_t v : img.pixels) {
    if (img.maxval > 255) {
      out.push_back(static_cast<std::uint8_t>(v >> 8));
      out.push_back(static_cast<std::uint8_t>(v & 0xff));
    } else {
      out.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return out;
}

BinaryMask decode_pbm(std::span<const std::uint8_t> bytes) {
  HeaderParser p(bytes);
  p.expect_magic('4');
  const std::size_t w = p.number("width");
  const std::size_t h = p.number("height");
  if (w == 0 || h == 0) throw ParseError("zero mask extent", p.pos());
  p.end_header();
  const std::size_t row_bytes = (w + 7) / 8;
  require_payload(bytes, p.pos(), row_bytes * h);
  BinaryMask mask(w, h);
  const std::uint8_t* r = bytes.data() + p.pos();
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) mask.set(x, y, (r[y * row_bytes + x / 8] >> (7 - x % 8)) & 1);
  return mask;
}

std::vector<std::uint8_t> encode_pbm(const BinaryMask& mask) {
  std::vector<std::uint8_t> out;
  append(out, "P4\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n");
  const std::size_t row_bytes = (mask.width() + 7) / 8;
  for (std::size_t y = 0; y < mask.height(); ++y) {
    std::vector<std::uint8_t> row(row_bytes, 0);
    for (std::size_t x = 0; x < mask.width(); ++x)
      if (mask.get(x, y)) row[x / 8] |= static_cast<std::uint8_t>(0x80 >> (x % 8));
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
  if (img.pixels.size() != 3 * img.width * img.height) throw ShapeError("PPM pixel count does not match extents");
  std::vector<std::uint8_t> out;
  append(out, "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n");
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

namespace {
template <typename F>
auto with_path(const std::filesystem::path& path, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.offset());
  }
}
}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return with_path(path, [&] { return decode_pgm(bytes); });
}
void write_pgm(const std::filesystem::path& path, const GrayImage& image) { write_file_bytes(path, encode_pgm(image)); }

BinaryMask read_mask(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return with_path(path, [&] { return decode_pbm(bytes); });
}
void write_mask(const std::filesystem::path& path, const BinaryMask& mask) { write_file_bytes(path, encode_pbm(mask)); }
void write_ppm(const std::filesystem::path& path, const RgbImage& image) { write_file_bytes(path, encode_ppm(image)); }

Tensor to_tensor(const GrayImage& img) {
  Tensor t({1, img.height, img.width});
  const float inv = 1.0f / static_cast<float>(img.maxval);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) t[i] = static_cast<float>(img.pixels[i]) * inv;
  return t;
}

GrayImage from_tensor(const Tensor& chw, std::uint16_t maxval) {
  if (chw.rank() != 3) throw ShapeError("expected C x H x W tensor, got " + shape_string(chw.shape()));
  GrayImage img;
  img.height = chw.dim(1);
  img.width = chw.dim(2);
  img.maxval = maxval;
  img.pixels.resize(img.width * img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double v = std::clamp(static_cast<double>(chw[i]), 0.0, 1.0);
    img.pixels[i] = static_cast<std::uint16_t>(std::lround(v * maxval));
  }
  return img;
}

Tensor read_image(const std::filesystem::path& path) { return to_tensor(read_pgm(path)); }
void write_image(const std::filesystem::path& path, const Tensor& chw, std::uint16_t maxval) {
  write_pgm(path, from_tensor(chw, maxval));
}

}  // namespace xguide
