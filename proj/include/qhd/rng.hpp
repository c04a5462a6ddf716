#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qhd {

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named random stream derived from a run seed. Streams with different names
/// are independent, so adding a consumer never shifts an existing one.
/// Uniform variates are built from raw engine bits to stay identical across
/// standard-library implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view stream) : engine_(splitmix64(seed ^ fnv1a(stream))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

namespace streams {
inline constexpr std::string_view kSampling = "sampling";
inline constexpr std::string_view kLyapunovOffset = "lyapunov-offset";
}  // namespace streams

}  // namespace qhd
