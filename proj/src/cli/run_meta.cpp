#include "xguide/cli/run_meta.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "xguide/error.hpp"

namespace xguide::cli {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

RunMeta::RunMeta(std::string command) { entries_.emplace_back("command", std::move(command)); }

void RunMeta::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = value;
      return;
    }
  entries_.emplace_back(key, value);
}

void RunMeta::set(const std::string& key, double value) { set(key, format_double(value)); }
void RunMeta::set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

void RunMeta::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
}

}  // namespace xguide::cli
