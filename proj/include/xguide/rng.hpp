#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace xguide {

// Seeded generator with portable, fully specified output.
//
// The engine is std::mt19937_64 whose sequence is fixed by the standard; the
// uniform and normal mappings are implemented here because the std
// distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream `index` derived from `seed`. Used wherever work is
  // split into items that may be processed in any order.
  static Rng substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  explicit Rng(std::mt19937_64 engine) : engine_(engine) {}
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace xguide
