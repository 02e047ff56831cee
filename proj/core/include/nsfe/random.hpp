#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace nsfe {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream key from a seed and a path of ids.
/// key = mix64(... mix64(mix64(seed) + id0 * G) + id1 * G ...), G = 0x9E3779B97F4A7C15.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) noexcept;

/// Counter-based Gaussian source.
///
/// Draw i is a pure function of (key, i): the SplitMix64 output at counter
/// 2i and 2i+1 gives two uniforms on (0,1) (top 53 bits, offset by half an
/// ulp), combined by the Box-Muller cosine branch. Results do not depend on
/// the order in which draws are requested.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
  }
  double uniform(std::uint64_t counter) const noexcept;
  double normal(std::uint64_t index) const noexcept;

  /// Fills out[j] = normal(offset + j).
  void fill(std::span<double> out, std::uint64_t offset = 0) const noexcept;

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace nsfe
