#include "harvest/nn/lyapunov_net.hpp"

#include "harvest/common/error.hpp"
#include "harvest/nn/mlp.hpp"

namespace harvest::nn {

LyapunovNet LyapunovNet::make(const MlpSpec& feature, std::uint64_t seed, double epsilon,
                              std::vector<double> input_scale) {
  if (epsilon <= 0.0) throw Error("lyapunov regularizer epsilon must be positive");
  if (!input_scale.empty() && static_cast<int>(input_scale.size()) != feature.input_dim()) {
    throw DimensionError("input scale length does not match state dimension");
  }
  return LyapunovNet{feature, init_params(feature, seed), epsilon, std::move(input_scale)};
}

MlpSpec LyapunovNet::default_feature_spec(int state_dim) {
  return MlpSpec::tanh_mlp(state_dim, {64, 64}, 64);
}

double lyapunov_value(const LyapunovNet& net, std::span<const double> x) {
  const int d = net.feature.input_dim();
  if (static_cast<int>(x.size()) != d) throw DimensionError("state dimension mismatch");
  std::vector<double> s(x.begin(), x.end());
  if (!net.input_scale.empty()) {
    for (int i = 0; i < d; ++i) s[i] /= net.input_scale[i];
  }
  const std::vector<double> origin(d, 0.0);
  const std::vector<double> g = forward(net.feature, net.params, s);
  const std::vector<double> g0 = forward(net.feature, net.params, origin);
  double v = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) v += (g[k] - g0[k]) * (g[k] - g0[k]);
  for (double si : s) v += net.epsilon * si * si;
  return v;
}

bool sublevel_test(const LyapunovNet& net, std::span<const double> x, double c) {
  if (!(c > 0.0)) throw Error("sublevel_test needs a positive level");
  return lyapunov_value(net, x) <= c;
}

LyapunovEvaluator::LyapunovEvaluator(const MlpSpec& feature) : jet_(feature) {}

Eigen::MatrixXd LyapunovEvaluator::scaled_with_origin(const LyapunovNet& net,
                                                      const Eigen::MatrixXd& x) const {
  const int d = net.feature.input_dim();
  if (x.rows() != d) throw DimensionError("state dimension mismatch");
  Eigen::MatrixXd s(d, x.cols() + 1);
  s.leftCols(x.cols()) = x;
  s.col(x.cols()).setZero();
  if (!net.input_scale.empty()) {
    for (int i = 0; i < d; ++i) s.row(i) /= net.input_scale[i];
  }
  return s;
}

Eigen::VectorXd LyapunovEvaluator::values(const LyapunovNet& net, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd s = scaled_with_origin(net, x);
  const Eigen::Index n = x.cols();
  const Eigen::MatrixXd& g = jet_.forward(net.params, s, autodiff::JetLayout::value_only());
  const Eigen::MatrixXd diff = g.leftCols(n).colwise() - g.col(n);
  return (diff.colwise().squaredNorm() +
          net.epsilon * s.leftCols(n).colwise().squaredNorm())
      .transpose();
}

Eigen::VectorXd LyapunovEvaluator::values_and_gradient(
    const LyapunovNet& net, const Eigen::MatrixXd& x,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& weight_of_values,
    std::span<double> grad) {
  const Eigen::MatrixXd s = scaled_with_origin(net, x);
  const Eigen::Index n = x.cols();
  const Eigen::MatrixXd& g = jet_.forward(net.params, s, autodiff::JetLayout::value_only());
  const Eigen::MatrixXd diff = g.leftCols(n).colwise() - g.col(n);
  const Eigen::VectorXd v =
      (diff.colwise().squaredNorm() + net.epsilon * s.leftCols(n).colwise().squaredNorm())
          .transpose();
  const Eigen::VectorXd w = weight_of_values(v);
  Eigen::MatrixXd gout(g.rows(), n + 1);
  gout.leftCols(n) = 2.0 * diff * w.asDiagonal();
  gout.col(n) = -gout.leftCols(n).rowwise().sum();
  jet_.backward(net.params, gout, grad);
  return v;
}

}  // namespace harvest::nn
