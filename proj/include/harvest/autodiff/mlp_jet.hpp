#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "harvest/autodiff/jet.hpp"
#include "harvest/nn/mlp_spec.hpp"

namespace harvest::autodiff {

/// Fixed affine map applied to raw inputs before the first layer:
/// net_input = (x - offset) / scale. Empty vectors mean identity.
struct InputMap {
  std::vector<double> offset;
  std::vector<double> scale;

  bool identity() const { return offset.empty(); }
};

/// Which derivative blocks a batched evaluation carries.
///
/// Block 0 is the value; then one tangent block per direction; then one
/// second-order block per (i, j) direction pair.
struct JetLayout {
  std::vector<Eigen::VectorXd> directions;
  std::vector<std::array<int, 2>> pairs;
  /// Block index of each JetComponent, -1 when the layout lacks it.
  std::array<int, kJetSize> block{0, -1, -1, -1, -1, -1};

  int block_count() const {
    return 1 + static_cast<int>(directions.size()) + static_cast<int>(pairs.size());
  }

  static JetLayout value_only() { return JetLayout{}; }
  /// Smallest layout over (x, t) inputs providing every component in `mask`.
  static JetLayout for_components(ComponentMask mask, int input_dim);
  /// Two arbitrary directions and their mixed second derivative.
  static JetLayout hyperdual(const Eigen::VectorXd& dir1, const Eigen::VectorXd& dir2);
};

/// Batched forward/backward through an MLP carrying input-derivative blocks.
///
/// forward() evaluates N points at once and keeps what backward() needs;
/// backward() takes d(loss)/d(output blocks) and accumulates the parameter
/// gradient, treating every derivative block as a differentiable quantity.
/// Not thread-safe; one instance per worker.
class BatchedJet {
 public:
  explicit BatchedJet(nn::MlpSpec spec);

  /// x is input_dim x N. Returns output_dim x (N * blocks); block b occupies
  /// columns [b*N, (b+1)*N).
  const Eigen::MatrixXd& forward(std::span<const double> params, const Eigen::MatrixXd& x,
                                 const JetLayout& layout, const InputMap& map = {});

  /// grad_output has the shape of the last forward() result. Adds into
  /// grad_params. If grad_input is given it receives d(loss)/dx (input_dim x N).
  void backward(std::span<const double> params, const Eigen::MatrixXd& grad_output,
                std::span<double> grad_params, Eigen::MatrixXd* grad_input = nullptr);

  const nn::MlpSpec& spec() const { return spec_; }
  int points() const { return points_; }
  int blocks() const { return static_cast<int>(layout_.block_count()); }

 private:
  nn::MlpSpec spec_;
  JetLayout layout_;
  InputMap map_;
  int points_ = 0;
  // Per layer: block-stacked input, block-stacked pre-activation, and the
  // activation derivatives at the value block.
  std::vector<Eigen::MatrixXd> inputs_;
  std::vector<Eigen::MatrixXd> pre_;
  std::vector<Eigen::ArrayXXd> s1_;
  std::vector<Eigen::ArrayXXd> s2_;
  std::vector<Eigen::ArrayXXd> s3_;
  // Backward scratch: gradients with respect to layer inputs and pre-activations.
  std::vector<Eigen::MatrixXd> grad_h_;
  std::vector<Eigen::MatrixXd> grad_z_;
  // Aligned copies of the caller's parameters and gradient so that results do
  // not depend on where the caller's buffers happen to sit in memory.
  Eigen::VectorXd theta_;
  Eigen::VectorXd dtheta_;
  Eigen::ArrayXXd tanh_scratch_;
};

}  // namespace harvest::autodiff
