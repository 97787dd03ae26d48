#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace compgen {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic per-stream seed: mixes a root seed with a textual label so
// independent streams (per task, role, shard) never share RNG state.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label) {
  return splitmix64(root ^ fnv1a64(label));
}

// mt19937_64 with hand-rolled bounded draws. The engine itself is fully
// specified by the standard, so seeded streams reproduce across platforms;
// std::uniform_int_distribution and std::shuffle are not specified, which is
// why the bounded draw and the shuffle are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform over [0, n). n must be > 0.
  std::size_t index(std::size_t n) {
    // 2^64 mod n; rejecting draws below keeps the modulo unbiased.
    const std::uint64_t min = (~std::uint64_t{0} - n + 1) % n;
    std::uint64_t x = engine_();
    while (x < min) x = engine_();
    return static_cast<std::size_t>(x % n);
  }

  // Uniform over [lo, hi], inclusive.
  int range(int lo, int hi) {
    return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo) + 1));
  }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[index(items.size())];
  }

  char pick_char(std::string_view chars) { return chars[index(chars.size())]; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace compgen
