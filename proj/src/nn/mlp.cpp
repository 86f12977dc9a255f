#include "harvest/nn/mlp.hpp"

#include <cmath>
#include <random>

#include "harvest/autodiff/mlp_forward.hpp"
#include "harvest/common/error.hpp"
#include "harvest/common/rng.hpp"

namespace harvest::nn {

std::vector<double> init_params(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<double> params(spec.param_count(), 0.0);
  Rng rng = make_rng(seed, "nn.init");
  for (int l = 0; l < spec.layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / (spec.fan_in(l) + spec.fan_out(l)));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (int c = 0; c < spec.fan_in(l); ++c) {
      for (int r = 0; r < spec.fan_out(l); ++r) params[spec.weight_index(l, r, c)] = dist(rng);
    }
  }
  return params;
}

std::vector<double> forward(const MlpSpec& spec, std::span<const double> params,
                            std::span<const double> x) {
  return autodiff::mlp_forward<double, double>(spec, params,
                                               std::vector<double>(x.begin(), x.end()));
}

Network::Network(MlpSpec spec, std::vector<double> params)
    : spec_(std::move(spec)), params_(std::move(params)), jet_(spec_) {
  if (params_.empty()) params_.assign(spec_.param_count(), 0.0);
  if (params_.size() != spec_.param_count()) {
    throw DimensionError("parameter vector length does not match network spec");
  }
}

Network::Network(const Network& other)
    : spec_(other.spec_), params_(other.params_), jet_(other.spec_) {}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    spec_ = other.spec_;
    params_ = other.params_;
    jet_ = autodiff::BatchedJet(spec_);
  }
  return *this;
}

const Eigen::MatrixXd& Network::forward(const Eigen::MatrixXd& x) {
  return jet_.forward(params_, x, autodiff::JetLayout::value_only());
}

void Network::backward(const Eigen::MatrixXd& grad_output, std::span<double> grad,
                       Eigen::MatrixXd* grad_input) {
  jet_.backward(params_, grad_output, grad, grad_input);
}

}  // namespace harvest::nn
