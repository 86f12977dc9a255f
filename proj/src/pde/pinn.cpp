#include "harvest/pde/pinn.hpp"

#include <cmath>

#include "harvest/autodiff/ops.hpp"
#include "harvest/common/error.hpp"
#include "harvest/nn/mlp.hpp"

namespace harvest::pde {

nn::MlpSpec default_pinn_spec() { return nn::MlpSpec::tanh_mlp(2, {32, 32, 32}, 1); }

PinnModel make_pinn_model(const PdeProblem& problem, std::uint64_t seed, const nn::MlpSpec& spec) {
  spec.validate();
  if (spec.input_dim() != 2 || spec.output_dim() != 1) {
    throw DimensionError("a PINN network maps (x, t) to a scalar");
  }
  return {spec, nn::init_params(spec, seed), problem.domain.input_map()};
}

PinnEvaluator::PinnEvaluator(const PdeProblem& problem, const nn::MlpSpec& spec)
    : problem_(problem), interior_(spec), values_(spec) {
  boundary_.reserve(problem_.boundary.size());
  for (std::size_t k = 0; k < problem_.boundary.size(); ++k) boundary_.emplace_back(spec);
}

double PinnEvaluator::loss(const PinnModel& model, const CollocationSet& colloc, std::span<double> grad) {
  if (colloc.interior_count() == 0) throw SamplingError("PINN loss needs at least one interior point");
  if (colloc.boundary.size() != problem_.boundary.size()) {
    throw DimensionError("collocation set has " + std::to_string(colloc.boundary.size()) +
                         " boundary pieces, problem has " + std::to_string(problem_.boundary.size()));
  }
  const bool want_grad = !grad.empty();
  if (want_grad && grad.size() != model.params.size()) {
    throw DimensionError("gradient buffer does not match parameter count");
  }
  double total = 0.0;
  if (want_grad) {
    total += autodiff::accumulate_squared_operator(interior_, model.params, colloc.interior,
                                                   problem_.residual, 1.0, grad, model.map);
  } else {
    total += autodiff::operator_values(interior_, model.params, colloc.interior, problem_.residual,
                                       model.map)
                 .squaredNorm();
  }
  const double w = problem_.boundary_weight;
  for (std::size_t k = 0; k < boundary_.size(); ++k) {
    const Eigen::MatrixXd& pts = colloc.boundary[k];
    if (pts.cols() == 0 || w == 0.0) continue;
    const auto& op = problem_.boundary[k].op;
    if (want_grad) {
      total += autodiff::accumulate_squared_operator(boundary_[k], model.params, pts, op, w, grad, model.map);
    } else {
      total += w * autodiff::operator_values(boundary_[k], model.params, pts, op, model.map).squaredNorm();
    }
  }
  return total;
}

Eigen::VectorXd PinnEvaluator::residuals(const PinnModel& model, const Eigen::MatrixXd& points) {
  return autodiff::operator_values(interior_, model.params, points, problem_.residual, model.map);
}

Eigen::VectorXd PinnEvaluator::predict(const PinnModel& model, const Eigen::MatrixXd& points) {
  return values_.forward(model.params, points, autodiff::JetLayout::value_only(), model.map).row(0).transpose();
}

double pinn_loss(const PdeProblem& problem, const PinnModel& model, const CollocationSet& colloc,
                 std::span<double> grad) {
  PinnEvaluator eval(problem, model.spec);
  return eval.loss(model, colloc, grad);
}

Eigen::VectorXd reference_values(const PdeProblem& problem, const Eigen::MatrixXd& points) {
  if (problem.has_exact()) {
    Eigen::VectorXd out(points.cols());
    for (int n = 0; n < points.cols(); ++n) out[n] = exact_value(problem, {points(0, n), points(1, n)});
    return out;
  }
  if (!problem.reference) throw Error(problem.name + ": no reference solution installed");
  autodiff::BatchedJet jet(problem.reference->spec);
  return jet.forward(problem.reference->params, points, autodiff::JetLayout::value_only(),
                     problem.reference->map)
      .row(0)
      .transpose();
}

double relative_l2(const Eigen::VectorXd& predicted, const Eigen::VectorXd& reference) {
  if (predicted.size() != reference.size()) throw DimensionError("relative_l2: size mismatch");
  if (reference.size() == 0) throw SamplingError("relative_l2: empty evaluation set");
  const double num = (predicted - reference).squaredNorm();
  const double den = reference.squaredNorm();
  if (den < 1e-12) return std::sqrt(num / static_cast<double>(reference.size()));
  return std::sqrt(num / den);
}

double solution_error(const PdeProblem& problem, const PinnModel& model, const Eigen::MatrixXd& points) {
  PinnEvaluator eval(problem, model.spec);
  return relative_l2(eval.predict(model, points), reference_values(problem, points));
}

}  // namespace harvest::pde
