#pragma once

#include <span>
#include <vector>

namespace harvest {

/// Splits `total` items in proportion to nonnegative `weights` by
/// largest-remainder rounding. Ties go to the lower index. Result sums to
/// `total` and each entry differs from its exact share by less than one.
std::vector<int> largest_remainder(std::span<const double> weights, int total);

}  // namespace harvest
