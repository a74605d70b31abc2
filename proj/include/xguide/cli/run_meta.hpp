#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace xguide::cli {

// Flat key=value record of every resolved parameter of a run, in insertion order.
class RunMeta {
 public:
  explicit RunMeta(std::string command);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
  void set(const std::string& key, const std::filesystem::path& value) { set(key, value.generic_string()); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace xguide::cli
