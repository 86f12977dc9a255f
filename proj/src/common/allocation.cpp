#include "harvest/common/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "harvest/common/error.hpp"

namespace harvest {

std::vector<int> largest_remainder(std::span<const double> weights, int total) {
  if (weights.empty()) throw DimensionError("largest_remainder: no weights");
  if (total < 0) throw Error("largest_remainder: negative total");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("largest_remainder: weights must be finite and nonnegative");
    sum += w;
  }
  if (sum <= 0.0) throw Error("largest_remainder: weights sum to zero");

  const std::size_t n = weights.size();
  std::vector<int> counts(n);
  std::vector<double> remainder(n);
  int assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double share = weights[i] / sum * total;
    counts[i] = static_cast<int>(std::floor(share));
    remainder[i] = share - counts[i];
    assigned += counts[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < total; ++k) {
    ++counts[order[k % n]];
    ++assigned;
  }
  return counts;
}

}  // namespace harvest
