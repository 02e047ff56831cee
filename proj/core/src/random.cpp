#include "nsfe/random.hpp"

#include <cmath>
#include <numbers>

namespace nsfe {

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) noexcept {
  std::uint64_t key = mix64(seed);
  for (std::uint64_t id : ids) key = mix64(key + (id + 1) * 0x9E3779B97F4A7C15ULL);
  return key;
}

double NormalStream::uniform(std::uint64_t counter) const noexcept {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::normal(std::uint64_t index) const noexcept {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void NormalStream::fill(std::span<double> out, std::uint64_t offset) const noexcept {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = normal(offset + j);
}

}  // namespace nsfe
