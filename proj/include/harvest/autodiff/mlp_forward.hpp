#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "harvest/autodiff/hyperdual.hpp"
#include "harvest/autodiff/scalar_math.hpp"
#include "harvest/autodiff/tape.hpp"
#include "harvest/common/error.hpp"
#include "harvest/nn/mlp_spec.hpp"

namespace harvest::autodiff {

template <class A>
A activate(nn::Activation act, const A& z) {
  using std::tanh;
  switch (act) {
    case nn::Activation::kTanh:
      return tanh(z);
    case nn::Activation::kSoftplus:
      return softplus(z);
    case nn::Activation::kLinear:
      break;
  }
  return z;
}

/// Scalar-generic forward pass. A is the activation scalar type (double,
/// HyperDual<double>, Var, HyperDual<Var>), W the parameter scalar type.
/// This is the reference evaluation; BatchedJet is the fast one.
template <class A, class W>
std::vector<A> mlp_forward(const nn::MlpSpec& spec, std::span<const W> params, std::vector<A> h) {
  if (static_cast<int>(h.size()) != spec.input_dim()) {
    throw DimensionError("network expects " + std::to_string(spec.input_dim()) +
                         " inputs, got " + std::to_string(h.size()));
  }
  if (params.size() != spec.param_count()) {
    throw DimensionError("network expects " + std::to_string(spec.param_count()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  for (int l = 0; l < spec.layer_count(); ++l) {
    std::vector<A> next;
    next.reserve(spec.fan_out(l));
    const std::size_t boff = spec.bias_offset(l);
    for (int i = 0; i < spec.fan_out(l); ++i) {
      A acc = A(params[boff + i]);
      for (int j = 0; j < spec.fan_in(l); ++j) {
        acc = acc + h[j] * params[spec.weight_index(l, i, j)];
      }
      next.push_back(activate(spec.activations[l], acc));
    }
    h = std::move(next);
  }
  return h;
}

}  // namespace harvest::autodiff
