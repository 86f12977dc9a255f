#include "harvest/samplers/sequences.hpp"

#include <bit>

#include "harvest/common/error.hpp"

namespace harvest::samplers {

namespace {

constexpr int kSobolBits = 32;

struct SobolDirections {
  std::array<std::uint32_t, kSobolBits> dim1{};
  std::array<std::uint32_t, kSobolBits> dim2{};

  SobolDirections() {
    for (int k = 0; k < kSobolBits; ++k) dim1[k] = 1u << (31 - k);
    // Primitive polynomial x + 1 with m_1 = 1.
    dim2[0] = 1u << 31;
    for (int k = 1; k < kSobolBits; ++k) dim2[k] = dim2[k - 1] ^ (dim2[k - 1] >> 1);
  }
};

const SobolDirections& directions() {
  static const SobolDirections d;
  return d;
}

}  // namespace

double radical_inverse(unsigned base, std::uint64_t index) {
  if (base < 2) throw SamplingError("radical inverse base must be at least 2");
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  while (index > 0) {
    num = num * base + index % base;
    den *= base;
    index /= base;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

std::array<double, 2> halton_point(std::uint64_t i) {
  return {radical_inverse(2, i + 1), radical_inverse(3, i + 1)};
}

std::array<double, 2> sobol_point(std::uint64_t i) {
  const std::uint64_t n = i + 1;
  if (n >> kSobolBits) throw SamplingError("Sobol index exceeds the 32-bit direction table");
  const std::uint64_t gray = n ^ (n >> 1);
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  const auto& d = directions();
  for (int k = 0; k < kSobolBits; ++k) {
    if ((gray >> k) & 1u) {
      x ^= d.dim1[k];
      y ^= d.dim2[k];
    }
  }
  constexpr double kScale = 1.0 / 4294967296.0;
  return {x * kScale, y * kScale};
}

}  // namespace harvest::samplers
