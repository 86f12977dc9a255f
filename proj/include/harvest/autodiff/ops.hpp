#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "harvest/autodiff/hyperdual.hpp"
#include "harvest/autodiff/jet.hpp"
#include "harvest/autodiff/mlp_jet.hpp"
#include "harvest/nn/mlp_spec.hpp"

namespace harvest::autodiff {

/// Network outputs at x with exact first derivatives along dir1, dir2 and the
/// mixed second derivative. Scalar reference path.
std::vector<HyperDualScalar> eval_hyperdual(const nn::MlpSpec& spec,
                                            std::span<const double> params,
                                            std::span<const double> x,
                                            std::span<const double> dir1,
                                            std::span<const double> dir2);

/// Jet of a single-output network at one (x, t) point, components in `mask`.
/// Scalar reference path built on eval_hyperdual.
JetPoint<double> eval_jet(const nn::MlpSpec& spec, std::span<const double> params,
                          const Coord& where, ComponentMask mask, const InputMap& map = {});

/// d/dtheta of op(jet of u_theta at x)^2, with the hyper-dual jet components
/// recorded on a parameter tape (forward-over-reverse).
std::vector<double> grad_params_of_residual(const nn::MlpSpec& spec,
                                            std::span<const double> params, const Coord& where,
                                            const PointOperator& op, const InputMap& map = {});

/// Value of op at each column of points (2 x N). Batched path.
Eigen::VectorXd operator_values(BatchedJet& jet, std::span<const double> params,
                                const Eigen::MatrixXd& points, const PointOperator& op,
                                const InputMap& map = {});

/// weight * sum over columns of op(jet)^2; adds its parameter gradient into
/// `grad` (which must have parameter length). Batched path.
double accumulate_squared_operator(BatchedJet& jet, std::span<const double> params,
                                   const Eigen::MatrixXd& points, const PointOperator& op,
                                   double weight, std::span<double> grad,
                                   const InputMap& map = {});

}  // namespace harvest::autodiff
