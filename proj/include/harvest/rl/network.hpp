#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "harvest/autodiff/mlp_jet.hpp"
#include "harvest/nn/adam.hpp"
#include "harvest/nn/mlp_spec.hpp"

namespace harvest::rl {

/// Plain batched MLP with its own Adam state, for actors and critics.
class Network {
 public:
  Network(nn::MlpSpec spec, std::uint64_t seed, double lr);

  /// X is input_dim x N; returns output_dim x N.
  const Eigen::MatrixXd& forward(const Eigen::MatrixXd& X);
  /// After forward(): accumulates d(loss)/d(params) into grad(); writes
  /// d(loss)/d(input) when grad_input is given.
  void backward(const Eigen::MatrixXd& grad_output, Eigen::MatrixXd* grad_input = nullptr);

  void zero_grad();
  std::vector<double>& grad() { return grad_; }
  /// Adam step with the accumulated gradient, then clears it.
  void apply_gradient();

  /// theta <- tau * source + (1 - tau) * theta.
  void polyak_from(const Network& source, double tau);

  const nn::MlpSpec& spec() const { return spec_; }
  std::vector<double> params;
  nn::AdamState adam;

 private:
  nn::MlpSpec spec_;
  autodiff::BatchedJet jet_;
  std::vector<double> grad_;
};

/// `net` with its output layer redrawn uniformly in [-bound, bound], so the
/// initial outputs sit near zero.
Network with_small_output_layer(Network net, std::uint64_t seed, double bound = 3e-3);

/// Per-dimension running mean and variance (Welford). Disabled instances pass
/// inputs through unchanged.
struct RunningNorm {
  bool enabled = false;
  double count = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd m2;

  RunningNorm() = default;
  RunningNorm(int dim, bool enabled);

  void observe(const Eigen::VectorXd& x);
  Eigen::VectorXd variance() const;
  /// (x - mean) / sqrt(var + 1e-8), clipped to [-10, 10].
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply_columns(const Eigen::MatrixXd& X) const;
};

/// alpha = lo + (hi - lo)(u + 1) / 2 with u clamped to [-1, 1].
double alpha_from_action(double u, double lo = 1.1, double hi = 2.0);
/// softmax(temperature * u).
Eigen::VectorXd simplex_from_action(const Eigen::VectorXd& u, double temperature = 3.0);

}  // namespace harvest::rl
