#include "harvest/autodiff/ops.hpp"

#include <string>

#include "harvest/autodiff/mlp_forward.hpp"
#include "harvest/common/error.hpp"

namespace harvest::autodiff {

namespace {

void check_single_output(const nn::MlpSpec& spec) {
  if (spec.output_dim() != 1) {
    throw DimensionError("jet evaluation needs a single-output network, got " +
                         std::to_string(spec.output_dim()) + " outputs");
  }
}

double mapped(const InputMap& map, int i, double x) {
  return map.identity() ? x : (x - map.offset[i]) / map.scale[i];
}

double mapped_dir(const InputMap& map, int i, double d) {
  return map.identity() ? d : d / map.scale[i];
}

constexpr ComponentMask kNeedsX =
    bit(JetComponent::kUx) | bit(JetComponent::kUxx) | bit(JetComponent::kUxt);
constexpr ComponentMask kNeedsT =
    bit(JetComponent::kUt) | bit(JetComponent::kUtt) | bit(JetComponent::kUxt);

}  // namespace

std::vector<HyperDualScalar> eval_hyperdual(const nn::MlpSpec& spec,
                                            std::span<const double> params,
                                            std::span<const double> x,
                                            std::span<const double> dir1,
                                            std::span<const double> dir2) {
  const auto in = static_cast<std::size_t>(spec.input_dim());
  if (x.size() != in || dir1.size() != in || dir2.size() != in) {
    throw DimensionError("eval_hyperdual: input and seed directions must have length " +
                         std::to_string(in));
  }
  std::vector<HyperDualScalar> h(in);
  for (std::size_t i = 0; i < in; ++i) h[i] = HyperDualScalar(x[i], dir1[i], dir2[i], 0.0);
  return mlp_forward<HyperDualScalar, double>(spec, params, std::move(h));
}

JetPoint<double> eval_jet(const nn::MlpSpec& spec, std::span<const double> params,
                          const Coord& where, ComponentMask mask, const InputMap& map) {
  check_single_output(spec);
  const int in = spec.input_dim();
  if ((mask & kNeedsT) && in < 2) throw DimensionError("t-derivative of a one-input network");
  std::vector<double> x(in);
  for (int i = 0; i < in; ++i) x[i] = mapped(map, i, where[i]);
  auto seeded = [&](int a, int b) {
    std::vector<double> d1(in, 0.0);
    std::vector<double> d2(in, 0.0);
    d1[a] = mapped_dir(map, a, 1.0);
    d2[b] = mapped_dir(map, b, 1.0);
    return eval_hyperdual(spec, params, x, d1, d2).front();
  };
  JetPoint<double> jet;
  const std::vector<double> zero(in, 0.0);
  jet.u = eval_hyperdual(spec, params, x, zero, zero).front().value;
  if (mask & (bit(JetComponent::kUx) | bit(JetComponent::kUxx))) {
    const HyperDualScalar r = seeded(0, 0);
    jet.u_x = r.d1;
    jet.u_xx = r.d12;
  }
  if (mask & (bit(JetComponent::kUt) | bit(JetComponent::kUtt))) {
    const HyperDualScalar r = seeded(1, 1);
    jet.u_t = r.d1;
    jet.u_tt = r.d12;
  }
  if (mask & bit(JetComponent::kUxt)) jet.u_xt = seeded(0, 1).d12;
  return jet;
}

std::vector<double> grad_params_of_residual(const nn::MlpSpec& spec,
                                            std::span<const double> params, const Coord& where,
                                            const PointOperator& op, const InputMap& map) {
  check_single_output(spec);
  const int in = spec.input_dim();
  if ((op.mask & kNeedsT) && in < 2) throw DimensionError("t-derivative of a one-input network");
  ParamTape tape;
  const std::vector<Var> theta = tape.parameters(params);
  const std::span<const Var> theta_span(theta);

  using HD = HyperDual<Var>;
  auto pass = [&](int a, int b) {
    std::vector<HD> h(in);
    for (int i = 0; i < in; ++i) {
      h[i] = HD(Var(mapped(map, i, where[i])), Var(i == a ? mapped_dir(map, i, 1.0) : 0.0),
                Var(i == b ? mapped_dir(map, i, 1.0) : 0.0), Var(0.0));
    }
    return mlp_forward<HD, Var>(spec, theta_span, std::move(h)).front();
  };

  JetPoint<Var> jet;
  bool have_value = false;
  if (op.mask & (bit(JetComponent::kUx) | bit(JetComponent::kUxx))) {
    const HD r = pass(0, 0);
    jet.u = r.value;
    jet.u_x = r.d1;
    jet.u_xx = r.d12;
    have_value = true;
  }
  if (op.mask & (bit(JetComponent::kUt) | bit(JetComponent::kUtt))) {
    const HD r = pass(1, 1);
    if (!have_value) jet.u = r.value;
    jet.u_t = r.d1;
    jet.u_tt = r.d12;
    have_value = true;
  }
  if (op.mask & bit(JetComponent::kUxt)) {
    const HD r = pass(0, 1);
    if (!have_value) jet.u = r.value;
    jet.u_xt = r.d12;
    have_value = true;
  }
  if (!have_value) {
    std::vector<Var> h(in);
    for (int i = 0; i < in; ++i) h[i] = Var(mapped(map, i, where[i]));
    jet.u = mlp_forward<Var, Var>(spec, theta_span, std::move(h)).front();
  }
  const Var r = op.taped(jet, where);
  return tape.grad_params(r * r, params.size());
}

namespace {

JetPoint<double> gather(const Eigen::MatrixXd& out, const JetLayout& layout, int n, int N) {
  JetPoint<double> jet;
  for (int k = 0; k < kJetSize; ++k) {
    const int b = layout.block[k];
    if (b >= 0) jet.at(static_cast<JetComponent>(k)) = out(0, static_cast<Eigen::Index>(b) * N + n);
  }
  return jet;
}

}  // namespace

Eigen::VectorXd operator_values(BatchedJet& jet, std::span<const double> params,
                                const Eigen::MatrixXd& points, const PointOperator& op,
                                const InputMap& map) {
  check_single_output(jet.spec());
  const JetLayout layout = JetLayout::for_components(op.mask, jet.spec().input_dim());
  const Eigen::MatrixXd& out = jet.forward(params, points, layout, map);
  const int N = static_cast<int>(points.cols());
  Eigen::VectorXd values(N);
  for (int n = 0; n < N; ++n) {
    values[n] = op.plain(gather(out, layout, n, N), Coord{points(0, n), points(1, n)});
  }
  return values;
}

double accumulate_squared_operator(BatchedJet& jet, std::span<const double> params,
                                   const Eigen::MatrixXd& points, const PointOperator& op,
                                   double weight, std::span<double> grad, const InputMap& map) {
  check_single_output(jet.spec());
  const int N = static_cast<int>(points.cols());
  if (N == 0) return 0.0;
  const JetLayout layout = JetLayout::for_components(op.mask, jet.spec().input_dim());
  const Eigen::MatrixXd& out = jet.forward(params, points, layout, map);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(1, out.cols());
  double loss = 0.0;
  for (int n = 0; n < N; ++n) {
    const ResidualGrad r =
        op.evaluate(gather(out, layout, n, N), Coord{points(0, n), points(1, n)});
    loss += weight * r.value * r.value;
    for (int k = 0; k < kJetSize; ++k) {
      const int b = layout.block[k];
      if (b >= 0) g(0, static_cast<Eigen::Index>(b) * N + n) = 2.0 * weight * r.value * r.grad[k];
    }
  }
  jet.backward(params, g, grad);
  return loss;
}

}  // namespace harvest::autodiff
