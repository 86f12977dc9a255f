#pragma once

#include <array>
#include <cstdint>

namespace harvest::samplers {

/// Van der Corput radical inverse of `index` in `base`, computed with integer
/// numerator and denominator so small indices are exact.
double radical_inverse(unsigned base, std::uint64_t index);

/// Point i (i >= 0) of the 2-D Halton sequence in bases 2 and 3, using
/// sequence index i + 1 so the origin is skipped.
std::array<double, 2> halton_point(std::uint64_t i);

/// Point i (i >= 0) of the 2-D Sobol sequence in gray-code order, skipping the
/// origin: i = 0, 1, 2 give first coordinates 1/2, 3/4, 1/4. Pure function of i.
std::array<double, 2> sobol_point(std::uint64_t i);

}  // namespace harvest::samplers
