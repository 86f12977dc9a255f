#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "harvest/autodiff/mlp_jet.hpp"
#include "harvest/pde/collocation.hpp"
#include "harvest/pde/problem.hpp"

namespace harvest::pde {

/// 3 hidden layers x 32 tanh units.
nn::MlpSpec default_pinn_spec();

PinnModel make_pinn_model(const PdeProblem& problem, std::uint64_t seed,
                          const nn::MlpSpec& spec = default_pinn_spec());

/// Loss, residual and prediction evaluation with reusable scratch buffers.
/// One instance per training loop; not thread-safe.
class PinnEvaluator {
 public:
  PinnEvaluator(const PdeProblem& problem, const nn::MlpSpec& spec);

  /// sum over interior of r^2 + w * sum over boundary of B^2. When `grad` is
  /// nonempty its gradient is added into it. Throws on empty interior.
  double loss(const PinnModel& model, const CollocationSet& colloc, std::span<double> grad = {});

  /// Residual r at each column of points.
  Eigen::VectorXd residuals(const PinnModel& model, const Eigen::MatrixXd& points);

  /// u at each column of points.
  Eigen::VectorXd predict(const PinnModel& model, const Eigen::MatrixXd& points);

  const PdeProblem& problem() const { return problem_; }

 private:
  PdeProblem problem_;
  autodiff::BatchedJet interior_;
  std::vector<autodiff::BatchedJet> boundary_;
  autodiff::BatchedJet values_;
};

double pinn_loss(const PdeProblem& problem, const PinnModel& model, const CollocationSet& colloc,
                 std::span<double> grad = {});

/// Closed-form or reference-network values at each column of points.
Eigen::VectorXd reference_values(const PdeProblem& problem, const Eigen::MatrixXd& points);

/// Relative L2 error of `predicted` against `reference`; RMSE when the
/// reference has squared norm below 1e-12.
double relative_l2(const Eigen::VectorXd& predicted, const Eigen::VectorXd& reference);

double solution_error(const PdeProblem& problem, const PinnModel& model, const Eigen::MatrixXd& points);

}  // namespace harvest::pde
