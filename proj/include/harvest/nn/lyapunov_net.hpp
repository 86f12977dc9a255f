#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "harvest/autodiff/mlp_jet.hpp"
#include "harvest/nn/mlp_spec.hpp"

namespace harvest::nn {

/// Lyapunov candidate v(x) = |g(s(x)) - g(0)|^2 + eps * |s(x)|^2 where g is a
/// feature MLP and s divides each state coordinate by a fixed scale.
/// Subtracting g(0) makes v(0) = 0 exactly; the eps term makes v > 0 off the origin.
struct LyapunovNet {
  MlpSpec feature;
  std::vector<double> params;
  double epsilon = 1e-3;
  std::vector<double> input_scale;  // empty means unscaled

  static LyapunovNet make(const MlpSpec& feature, std::uint64_t seed, double epsilon,
                          std::vector<double> input_scale = {});
  /// 2 hidden layers x 64 tanh, 64 features.
  static MlpSpec default_feature_spec(int state_dim = 2);
};

double lyapunov_value(const LyapunovNet& net, std::span<const double> x);

/// v(x) <= c. Throws harvest::Error when c <= 0.
bool sublevel_test(const LyapunovNet& net, std::span<const double> x, double c);

/// Batched evaluation of v and its parameter gradient.
class LyapunovEvaluator {
 public:
  explicit LyapunovEvaluator(const MlpSpec& feature);

  /// x is state_dim x N.
  Eigen::VectorXd values(const LyapunovNet& net, const Eigen::MatrixXd& x);

  /// Values at x; adds sum_n weight[n] * dv(x_n)/dtheta into grad.
  Eigen::VectorXd values_and_gradient(const LyapunovNet& net, const Eigen::MatrixXd& x,
                                      const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& weight_of_values,
                                      std::span<double> grad);

 private:
  Eigen::MatrixXd scaled_with_origin(const LyapunovNet& net, const Eigen::MatrixXd& x) const;

  autodiff::BatchedJet jet_;
};

}  // namespace harvest::nn
