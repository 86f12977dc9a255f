#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace harvest::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;

  AdamState() = default;
  explicit AdamState(std::size_t n, AdamConfig cfg = {}) : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

/// Bias-corrected Adam update in place. Throws DivergenceError (naming the
/// first bad index and step) if any gradient entry is not finite.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace harvest::nn
