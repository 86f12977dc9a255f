#include "harvest/lyapunov/level_set.hpp"

#include <algorithm>
#include <cmath>

#include "harvest/common/error.hpp"
#include "harvest/common/format.hpp"

namespace harvest::lyapunov {

Eigen::MatrixXd sample_level_set(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, const StateBox& box,
                                 double c, double alpha, int count, Rng& rng, long max_proposals,
                                 long* proposed_out) {
  if (!(c > 0.0)) throw SamplingError("level must be positive, got " + format_double(c));
  if (!(alpha >= 1.0)) throw SamplingError("expansion multiplier must be at least 1, got " + format_double(alpha));
  if (count < 1) throw SamplingError("level-set sample count must be positive");
  const double threshold = alpha * c;
  const int chunk = 4096;
  Eigen::MatrixXd out(2, count);
  Eigen::MatrixXd proposals(2, chunk);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int accepted = 0;
  long proposed = 0;
  while (accepted < count) {
    if (proposed >= max_proposals) {
      throw SamplingError("level set V(" + format_double(threshold) + ") accepted " + std::to_string(accepted) +
                          " of " + std::to_string(proposed) + " proposals");
    }
    for (int n = 0; n < chunk; ++n) {
      proposals(0, n) = box.half_width[0] * u(rng);
      proposals(1, n) = box.half_width[1] * u(rng);
    }
    const Eigen::VectorXd v = eval.values(net, proposals);
    for (int n = 0; n < chunk && accepted < count; ++n) {
      ++proposed;
      if (v[n] <= threshold) out.col(accepted++) = proposals.col(n);
    }
    if (proposed >= 100000 && static_cast<double>(accepted) < 1e-4 * static_cast<double>(proposed)) {
      throw SamplingError("level set V(" + format_double(threshold) + ") acceptance rate below 1e-4");
    }
  }
  if (proposed_out != nullptr) *proposed_out = proposed;
  return out;
}

Labels label_batch(const PendulumParams& params, const LinearController& ctrl, nn::LyapunovEvaluator& eval,
                   const nn::LyapunovNet& net, const Eigen::MatrixXd& states, double c, int horizon) {
  if (horizon < 1) throw ConfigError("simulation horizon must be positive");
  Eigen::MatrixXd end(2, states.cols());
  for (int n = 0; n < states.cols(); ++n) {
    const State s = simulate(params, {states(0, n), states(1, n)}, ctrl, horizon);
    end.col(n) << s[0], s[1];
  }
  const Eigen::VectorXd v = eval.values(net, end);
  Labels labels(states.cols());
  for (int n = 0; n < states.cols(); ++n) labels[n] = std::isfinite(v[n]) && v[n] <= c ? 1 : 0;
  return labels;
}

double hinge_loss(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, const Eigen::MatrixXd& states,
                  const Labels& labels, double c, std::span<double> grad) {
  const Eigen::Index n = states.cols();
  if (n == 0) throw SamplingError("hinge loss needs a nonempty batch");
  if (static_cast<Eigen::Index>(labels.size()) != n) throw DimensionError("one label per state required");
  if (!(c > 0.0)) throw Error("hinge loss needs a positive level");
  auto margin = [&](const Eigen::VectorXd& v, Eigen::Index i) {
    const double y = labels[i] ? 1.0 : -1.0;
    return 1.0 - y * (c - v[i]) / c;
  };
  double loss = 0.0;
  auto weights = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd w(n);
    loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = margin(v, i);
      const double y = labels[i] ? 1.0 : -1.0;
      loss += std::max(0.0, m);
      w[i] = m > 0.0 ? y / (c * static_cast<double>(n)) : 0.0;
    }
    loss /= static_cast<double>(n);
    return w;
  };
  if (grad.empty()) {
    weights(eval.values(net, states));
  } else {
    eval.values_and_gradient(net, states, weights, grad);
  }
  return loss;
}

double classifier_update(nn::LyapunovEvaluator& eval, nn::LyapunovNet& net, const Eigen::MatrixXd& states,
                         const Labels& labels, double c, int steps, nn::AdamState& adam) {
  std::vector<double> grad(net.params.size());
  double loss = 0.0;
  for (int s = 0; s < steps; ++s) {
    std::fill(grad.begin(), grad.end(), 0.0);
    loss = hinge_loss(eval, net, states, labels, c, grad);
    if (!std::isfinite(loss)) throw DivergenceError("hinge loss is not finite at Adam step " + std::to_string(adam.step));
    nn::adam_step(net.params, grad, adam);
  }
  return loss;
}

LevelUpdate update_level(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, const Eigen::MatrixXd& states,
                         const Labels& labels, double previous) {
  if (static_cast<Eigen::Index>(labels.size()) != states.cols()) throw DimensionError("one label per state required");
  double best = -1.0;
  bool any = false;
  if (states.cols() > 0) {
    const Eigen::VectorXd v = eval.values(net, states);
    for (Eigen::Index i = 0; i < states.cols(); ++i) {
      if (labels[i]) {
        best = any ? std::max(best, v[i]) : v[i];
        any = true;
      }
    }
  }
  if (!any || !(best > 0.0) || !std::isfinite(best)) return {previous, true};
  return {best, false};
}

double safe_set_fraction(const Eigen::VectorXd& grid_values, double c, const RoaGrid& grid) {
  if (grid_values.size() != grid.size()) throw DimensionError("one value per grid cell required");
  if (grid.safe_count == 0) return 0.0;
  int certified = 0;
  for (int k = 0; k < grid.size(); ++k) certified += grid.safe[k] && grid_values[k] <= c;
  return static_cast<double>(certified) / grid.safe_count;
}

double safe_set_fraction(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, double c, const RoaGrid& grid) {
  return safe_set_fraction(eval.values(net, grid.points), c, grid);
}

double level_fraction(const Eigen::VectorXd& grid_values, double c) {
  if (grid_values.size() == 0) return 0.0;
  return static_cast<double>((grid_values.array() <= c).count()) / static_cast<double>(grid_values.size());
}

double initial_level(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, const PendulumParams& params,
                     const LinearController& ctrl, const StateBox& box, double fraction, int horizon,
                     double tolerance) {
  const int per_side = 50;
  for (int attempt = 0; attempt < 20; ++attempt, fraction *= 0.5) {
    const double a = fraction * box.half_width[0];
    const double b = fraction * box.half_width[1];
    Eigen::MatrixXd perimeter(2, 4 * per_side);
    for (int i = 0; i < per_side; ++i) {
      const double s = -1.0 + 2.0 * i / per_side;
      perimeter.col(4 * i) << a * s, -b;
      perimeter.col(4 * i + 1) << a, b * s;
      perimeter.col(4 * i + 2) << -a * s, b;
      perimeter.col(4 * i + 3) << -a, -b * s;
    }
    bool verified = true;
    for (int n = 0; n < perimeter.cols() && verified; ++n) {
      const State end = simulate(params, {perimeter(0, n), perimeter(1, n)}, ctrl, horizon);
      verified = std::hypot(end[0], end[1]) < tolerance;
    }
    if (!verified) continue;
    const double c0 = eval.values(net, perimeter).minCoeff();
    if (c0 > 0.0 && std::isfinite(c0)) return c0;
  }
  throw ConvergenceError("no verified box around the origin for the initial level");
}

RoaSession::RoaSession(const RoaConfig& config, std::shared_ptr<const RoaGrid> grid, const LinearController& ctrl,
                       std::uint64_t seed)
    : config_(config),
      grid_(std::move(grid)),
      ctrl_(ctrl),
      net_(nn::LyapunovNet::make(config.feature, substream_seed(seed, "lyapunov.init"), config.epsilon,
                                 {config.box.half_width[0], config.box.half_width[1]})),
      eval_(config.feature),
      adam_(net_.params.size(), {.lr = config.lr}),
      sample_rng_(make_rng(seed, "lyapunov.sample")) {
  if (!grid_) throw Error("RoaSession needs a ground-truth grid");
  if (config_.batch < 1 || config_.horizon < 1 || config_.inner_iterations < 1 || config_.adam_steps < 1) {
    throw ConfigError("ROA session budgets must be positive");
  }
  level_ = initial_level(eval_, net_, config_.pendulum, ctrl_, config_.box, config_.initial_box_fraction,
                         config_.grid_horizon, config_.grid_tolerance);
  refresh_grid_metrics();
}

void RoaSession::refresh_grid_metrics() {
  const Eigen::VectorXd v = eval_.values(net_, grid_->points);
  fraction_ = lyapunov::safe_set_fraction(v, level_, *grid_);
  level_fraction_ = lyapunov::level_fraction(v, level_);
}

RoaSession::Step RoaSession::advance(double alpha) {
  if (!(alpha >= 1.0)) throw ConfigError("expansion multiplier must be at least 1, got " + format_double(alpha));
  Step out;
  out.alpha = shrink_next_ ? 1.0 + 0.5 * (alpha - 1.0) : alpha;
  const Eigen::MatrixXd X = sample_level_set(eval_, net_, config_.box, level_, out.alpha, config_.batch, sample_rng_);
  const Labels labels = label_batch(config_.pendulum, ctrl_, eval_, net_, X, level_, config_.horizon);
  int safe = 0;
  for (unsigned char y : labels) safe += y;
  out.safe_ratio = static_cast<double>(safe) / static_cast<double>(labels.size());
  for (int it = 0; it < config_.inner_iterations; ++it) {
    classifier_update(eval_, net_, X, labels, level_, config_.adam_steps, adam_);
  }
  const LevelUpdate update = update_level(eval_, net_, X, labels, level_);
  level_ = update.level;
  shrink_next_ = update.stalled;
  refresh_grid_metrics();
  out.stalled = update.stalled;
  out.level = level_;
  out.safe_set_fraction = fraction_;
  out.level_fraction = level_fraction_;
  return out;
}

}  // namespace harvest::lyapunov
