#include "xguide/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string>

#include "xguide/error.hpp"

namespace xguide {

namespace {

constexpr std::uint8_t kMagic[4] = {'X', 'G', 'D', '1'};

enum Tag : std::uint16_t {
  kChannels = 1,
  kHeight = 2,
  kWidth = 3,
  kHead = 4,
  kBlockCount = 5,
  kHasOffset = 6,
  kScaleBits = 7,
  kBlockBase = 16,
};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  using U = std::make_unsigned_t<T>;
  const auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  template <typename T>
  T get(const char* what) {
    if (pos_ + sizeof(T) > bytes_.size()) throw ParseError(std::string("checkpoint truncated reading ") + what, pos_);
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      u |= static_cast<std::make_unsigned_t<T>>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  float get_f32() { return std::bit_cast<float>(get<std::uint32_t>("parameter")); }
  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

}  // namespace

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint8_t> encode_checkpoint(const Model& model) {
  const ModelConfig& cfg = model.config();
  std::vector<std::pair<std::uint16_t, std::int64_t>> fields = {
      {kChannels, static_cast<std::int64_t>(cfg.channels)},
      {kHeight, static_cast<std::int64_t>(cfg.height)},
      {kWidth, static_cast<std::int64_t>(cfg.width)},
      {kHead, static_cast<std::int64_t>(cfg.head)},
      {kBlockCount, static_cast<std::int64_t>(cfg.blocks.size())},
  };
  for (std::size_t b = 0; b < cfg.blocks.size(); ++b) {
    const auto base = static_cast<std::uint16_t>(kBlockBase + 3 * b);
    fields.emplace_back(base, static_cast<std::int64_t>(cfg.blocks[b].filters));
    fields.emplace_back(base + 1, cfg.blocks[b].relu ? 1 : 0);
    fields.emplace_back(base + 2, cfg.blocks[b].pool ? 1 : 0);
  }
  const InputNormalization& norm = model.normalization();
  if (!norm.is_identity()) {
    fields.emplace_back(kHasOffset, norm.offset.empty() ? 0 : 1);
    fields.emplace_back(kScaleBits, std::bit_cast<std::uint32_t>(norm.scale));
  }

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_le(out, static_cast<std::uint32_t>(fields.size()));
  for (const auto& [tag, value] : fields) {
    put_le(out, tag);
    put_le(out, value);
  }
  const Parameters& p = model.parameters();
  put_le(out, static_cast<std::uint64_t>(p.scalar_count()));
  for (const Tensor& t : p.tensors)
    for (float v : t.data()) put_le(out, std::bit_cast<std::uint32_t>(v));
  if (!norm.offset.empty()) {
    put_le(out, static_cast<std::uint64_t>(norm.offset.size()));
    for (float v : norm.offset.data()) put_le(out, std::bit_cast<std::uint32_t>(v));
  }
  const std::uint64_t sum = fnv1a64(std::span(out).subspan(4));
  put_le(out, sum);
  return out;
}

Model decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw ParseError("not a model checkpoint (bad magic)", 0);
  if (bytes.size() < 4 + 4 + 8 + 8) throw ParseError("checkpoint truncated", bytes.size());
  const std::size_t payload_end = bytes.size() - 8;
  Reader tail(bytes, payload_end);
  const auto stored = tail.get<std::uint64_t>("checksum");
  if (stored != fnv1a64(bytes.subspan(4, payload_end - 4)))
    throw ParseError("checkpoint checksum mismatch", payload_end);

  Reader r(bytes.first(payload_end), 4);
  const auto count = r.get<std::uint32_t>("field count");
  std::map<std::uint16_t, std::int64_t> fields;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t at = r.pos();
    const auto tag = r.get<std::uint16_t>("field tag");
    const auto value = r.get<std::int64_t>("field value");
    if (value < 0) throw ParseError("negative value for field tag " + std::to_string(tag), at);
    if (!fields.emplace(tag, value).second) throw ParseError("duplicate field tag " + std::to_string(tag), at);
  }
  auto field = [&](std::uint16_t tag) -> std::size_t {
    auto it = fields.find(tag);
    if (it == fields.end()) throw ParseError("checkpoint missing field tag " + std::to_string(tag), r.pos());
    return static_cast<std::size_t>(it->second);
  };

  ModelConfig cfg;
  cfg.channels = field(kChannels);
  cfg.height = field(kHeight);
  cfg.width = field(kWidth);
  const std::size_t head = field(kHead);
  if (head > 1) throw ParseError("unknown head kind " + std::to_string(head), r.pos());
  cfg.head = static_cast<HeadKind>(head);
  const std::size_t nb = field(kBlockCount);
  const bool normalized = fields.count(kHasOffset) || fields.count(kScaleBits);
  if (fields.size() != 5 + 3 * nb + (normalized ? 2 : 0)) throw ParseError("unexpected field count in checkpoint", r.pos());
  cfg.blocks.clear();
  for (std::size_t b = 0; b < nb; ++b) {
    const auto base = static_cast<std::uint16_t>(kBlockBase + 3 * b);
    cfg.blocks.push_back({field(base), field(base + 1) != 0, field(base + 2) != 0});
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("invalid architecture in checkpoint: ") + e.what(), r.pos());
  }

  Parameters params = Parameters::zeros(cfg);
  const std::size_t at = r.pos();
  const auto scalars = r.get<std::uint64_t>("parameter count");
  if (scalars != params.scalar_count())
    throw ParseError("checkpoint holds " + std::to_string(scalars) + " parameters, architecture needs " +
                         std::to_string(params.scalar_count()),
                     at);
  for (Tensor& t : params.tensors)
    for (float& v : t.data()) v = r.get_f32();
  InputNormalization norm;
  if (normalized) {
    const std::size_t scale_bits = field(kScaleBits);
    if (scale_bits > 0xffffffffu) throw ParseError("normalization scale out of range", r.pos());
    norm.scale = std::bit_cast<float>(static_cast<std::uint32_t>(scale_bits));
    if (field(kHasOffset) != 0) {
      const std::size_t off_at = r.pos();
      const auto n = r.get<std::uint64_t>("offset count");
      if (n != shape_size(cfg.input_shape()))
        throw ParseError("checkpoint offset holds " + std::to_string(n) + " values, input needs " +
                             std::to_string(shape_size(cfg.input_shape())),
                         off_at);
      norm.offset = Tensor(cfg.input_shape());
      for (float& v : norm.offset.data()) v = r.get_f32();
    }
  }
  if (r.pos() != payload_end) throw ParseError("trailing bytes in checkpoint payload", r.pos());
  try {
    return Model(std::move(cfg), std::move(params), std::move(norm));
  } catch (const ConfigError& e) {
    throw ParseError(std::string("invalid input normalization in checkpoint: ") + e.what(), r.pos());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  const auto bytes = encode_checkpoint(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.offset());
  }
}

}  // namespace xguide
