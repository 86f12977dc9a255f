#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "harvest/common/rng.hpp"
#include "harvest/lyapunov/pendulum.hpp"
#include "harvest/lyapunov/roa.hpp"
#include "harvest/nn/adam.hpp"
#include "harvest/nn/lyapunov_net.hpp"

namespace harvest::lyapunov {

using Labels = std::vector<unsigned char>;

/// `count` states uniform over the box restricted to v(x) <= alpha * c, by
/// rejection. Throws SamplingError when fewer than 1e-4 of `max_proposals`
/// proposals are accepted. `proposed`, when given, receives the number of
/// proposals drawn up to the last accepted one.
Eigen::MatrixXd sample_level_set(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, const StateBox& box,
                                 double c, double alpha, int count, Rng& rng, long max_proposals = 1000000,
                                 long* proposed = nullptr);

/// 1 where the state after `horizon` closed-loop steps lies in V(c).
Labels label_batch(const PendulumParams& params, const LinearController& ctrl, nn::LyapunovEvaluator& eval,
                   const nn::LyapunovNet& net, const Eigen::MatrixXd& states, double c, int horizon);

/// Mean over the batch of max(0, 1 - y (c - v) / c) with y = +1 on safe labels.
/// Adds the parameter gradient into `grad` when it is nonempty.
double hinge_loss(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, const Eigen::MatrixXd& states,
                  const Labels& labels, double c, std::span<double> grad = {});

/// `steps` full-batch Adam steps on the hinge loss. Returns the loss before
/// the last step. Throws DivergenceError on a non-finite loss.
double classifier_update(nn::LyapunovEvaluator& eval, nn::LyapunovNet& net, const Eigen::MatrixXd& states,
                         const Labels& labels, double c, int steps, nn::AdamState& adam);

struct LevelUpdate {
  double level = 0.0;
  /// No safe state with positive v: the previous level was kept.
  bool stalled = false;
};

/// max of v over the safe states, or the previous level when that is not positive.
LevelUpdate update_level(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, const Eigen::MatrixXd& states,
                         const Labels& labels, double previous);

/// Truly safe grid cells certified by v <= c, over all truly safe cells.
double safe_set_fraction(const Eigen::VectorXd& grid_values, double c, const RoaGrid& grid);
double safe_set_fraction(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, double c, const RoaGrid& grid);

/// Fraction of all grid cells with v <= c.
double level_fraction(const Eigen::VectorXd& grid_values, double c);

/// Starting level: the minimum of v on the perimeter of a small box around
/// the origin whose perimeter states are verified to converge by simulation.
/// The box starts at `fraction` of the state box and halves until verified.
double initial_level(nn::LyapunovEvaluator& eval, const nn::LyapunovNet& net, const PendulumParams& params,
                     const LinearController& ctrl, const StateBox& box, double fraction = 0.1,
                     int horizon = 2000, double tolerance = 1e-2);

struct RoaConfig {
  PendulumParams pendulum;
  StateBox box;
  nn::MlpSpec feature = nn::LyapunovNet::default_feature_spec();
  double epsilon = 1e-3;
  int batch = 500;
  int horizon = 100;
  int inner_iterations = 10;
  int adam_steps = 10;
  double lr = 1e-3;
  double initial_box_fraction = 0.1;
  int grid_resolution = 101;
  int grid_horizon = 2000;
  double grid_tolerance = 1e-2;
};

/// One run of the expanding-level-set classifier training on fixed dynamics.
class RoaSession {
 public:
  struct Step {
    double alpha = 0.0;
    double safe_ratio = 0.0;
    double safe_set_fraction = 0.0;
    double level_fraction = 0.0;
    double level = 0.0;
    bool stalled = false;
  };

  RoaSession(const RoaConfig& config, std::shared_ptr<const RoaGrid> grid, const LinearController& ctrl,
             std::uint64_t seed);

  /// Sample V(alpha c), label, train, update the level. After a stall the
  /// next alpha is pulled halfway toward 1.
  Step advance(double alpha);

  double level() const { return level_; }
  double safe_set_fraction() const { return fraction_; }
  double level_fraction() const { return level_fraction_; }
  const nn::LyapunovNet& net() const { return net_; }

 private:
  void refresh_grid_metrics();

  RoaConfig config_;
  std::shared_ptr<const RoaGrid> grid_;
  LinearController ctrl_;
  nn::LyapunovNet net_;
  nn::LyapunovEvaluator eval_;
  nn::AdamState adam_;
  Rng sample_rng_;
  double level_ = 0.0;
  double fraction_ = 0.0;
  double level_fraction_ = 0.0;
  bool shrink_next_ = false;
};

}  // namespace harvest::lyapunov
