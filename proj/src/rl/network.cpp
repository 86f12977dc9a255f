#include "harvest/rl/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "harvest/common/error.hpp"
#include "harvest/nn/mlp.hpp"

namespace harvest::rl {

Network::Network(nn::MlpSpec spec, std::uint64_t seed, double lr)
    : params(nn::init_params(spec, seed)),
      adam(params.size(), {.lr = lr}),
      spec_(std::move(spec)),
      jet_(spec_),
      grad_(params.size(), 0.0) {}

Network with_small_output_layer(Network net, std::uint64_t seed, double bound) {
  const nn::MlpSpec& spec = net.spec();
  const int last = spec.layer_count() - 1;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-bound, bound);
  const std::size_t begin = spec.weight_offset(last);
  const std::size_t end = spec.bias_offset(last) + static_cast<std::size_t>(spec.fan_out(last));
  for (std::size_t i = begin; i < end; ++i) net.params[i] = u(rng);
  return net;
}

const Eigen::MatrixXd& Network::forward(const Eigen::MatrixXd& X) {
  return jet_.forward(params, X, autodiff::JetLayout::value_only());
}

void Network::backward(const Eigen::MatrixXd& grad_output, Eigen::MatrixXd* grad_input) {
  jet_.backward(params, grad_output, grad_, grad_input);
}

void Network::zero_grad() { std::fill(grad_.begin(), grad_.end(), 0.0); }

void Network::apply_gradient() {
  nn::adam_step(params, grad_, adam);
  zero_grad();
}

void Network::polyak_from(const Network& source, double tau) {
  if (source.params.size() != params.size()) throw DimensionError("polyak update between different networks");
  if (tau == 1.0) {
    params = source.params;
    return;
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i] = tau * source.params[i] + (1.0 - tau) * params[i];
}

RunningNorm::RunningNorm(int dim, bool enabled_)
    : enabled(enabled_), mean(Eigen::VectorXd::Zero(dim)), m2(Eigen::VectorXd::Zero(dim)) {}

void RunningNorm::observe(const Eigen::VectorXd& x) {
  if (!enabled) return;
  if (x.size() != mean.size()) throw DimensionError("normalizer width mismatch");
  count += 1.0;
  const Eigen::VectorXd delta = x - mean;
  mean += delta / count;
  m2 += delta.cwiseProduct(x - mean);
}

Eigen::VectorXd RunningNorm::variance() const {
  if (count < 2.0) return Eigen::VectorXd::Ones(mean.size());
  return m2 / count;
}

Eigen::VectorXd RunningNorm::apply(const Eigen::VectorXd& x) const {
  if (!enabled) return x;
  if (x.size() != mean.size()) throw DimensionError("normalizer width mismatch");
  const Eigen::ArrayXd z = (x - mean).array() / (variance().array() + 1e-8).sqrt();
  return z.max(-10.0).min(10.0).matrix();
}

Eigen::MatrixXd RunningNorm::apply_columns(const Eigen::MatrixXd& X) const {
  if (!enabled) return X;
  Eigen::MatrixXd out(X.rows(), X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) out.col(c) = apply(X.col(c));
  return out;
}

double alpha_from_action(double u, double lo, double hi) {
  const double v = lo + (hi - lo) * (std::clamp(u, -1.0, 1.0) + 1.0) / 2.0;
  return std::clamp(v, lo, hi);
}

Eigen::VectorXd simplex_from_action(const Eigen::VectorXd& u, double temperature) {
  if (u.size() == 0) throw DimensionError("empty simplex action");
  const Eigen::ArrayXd z = temperature * u.array();
  const Eigen::ArrayXd e = (z - z.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

}  // namespace harvest::rl
