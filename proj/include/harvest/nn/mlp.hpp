#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "harvest/autodiff/mlp_jet.hpp"
#include "harvest/nn/mlp_spec.hpp"

namespace harvest::nn {

/// Glorot-uniform weights (limit sqrt(6 / (fan_in + fan_out))), zero biases.
std::vector<double> init_params(const MlpSpec& spec, std::uint64_t seed);

/// Single-point forward pass through the scalar reference path.
std::vector<double> forward(const MlpSpec& spec, std::span<const double> params,
                            std::span<const double> x);

/// A network with its parameters and a batched value-only evaluator.
class Network {
 public:
  Network() : Network(MlpSpec::tanh_mlp(1, {}, 1), {}) {}
  Network(MlpSpec spec, std::vector<double> params);
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  const MlpSpec& spec() const { return spec_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  /// x is input_dim x N; result output_dim x N.
  const Eigen::MatrixXd& forward(const Eigen::MatrixXd& x);
  /// Backpropagates through the last forward(); adds into grad (parameter length).
  void backward(const Eigen::MatrixXd& grad_output, std::span<double> grad,
                Eigen::MatrixXd* grad_input = nullptr);

 private:
  MlpSpec spec_;
  std::vector<double> params_;
  autodiff::BatchedJet jet_;
};

}  // namespace harvest::nn
