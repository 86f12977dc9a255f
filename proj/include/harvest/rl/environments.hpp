#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "harvest/lyapunov/level_set.hpp"
#include "harvest/pde/pinn.hpp"
#include "harvest/samplers/samplers.hpp"

namespace harvest::rl {

/// Reward given when inner training diverges; the episode ends there.
inline constexpr double kDivergenceReward = -10.0;

/// -log10(error + 1e-8).
double pinn_reward(double error);
/// Safe-set fraction increment.
inline double lyapunov_reward(double before, double after) { return after - before; }

/// Expansion-multiplier MDP: one step is one resample/label/train/level update.
/// State (safe ratio, k / K, fraction of grid cells inside the level set).
class ExpansionEnv {
 public:
  static constexpr int kStateDim = 3;
  static constexpr int kActionDim = 1;

  struct StepResult {
    Eigen::VectorXd next_state;
    double reward = 0.0;
    bool done = false;
    bool diverged = false;
    lyapunov::RoaSession::Step info;
  };

  ExpansionEnv(const lyapunov::RoaConfig& config, std::shared_ptr<const lyapunov::RoaGrid> grid,
               const lyapunov::LinearController& ctrl, int resample_steps, std::uint64_t seed);

  const Eigen::VectorXd& state() const { return state_; }
  int step_index() const { return k_; }
  bool done() const { return k_ >= steps_ || diverged_; }
  double safe_set_fraction() const { return session_.safe_set_fraction(); }
  const lyapunov::RoaSession& session() const { return session_; }

  StepResult step(double alpha);

 private:
  lyapunov::RoaSession session_;
  int steps_;
  int k_ = 0;
  bool diverged_ = false;
  Eigen::VectorXd state_;
};

struct MixtureEnvConfig {
  int interior = 50;
  int boundary = pde::kDefaultBoundaryCount;
  int resample_steps = 10;
  int cadence = 1000;
  double lr = 1e-3;
  int eval_points = 1000;
  nn::MlpSpec spec = pde::default_pinn_spec();
  samplers::SamplerOptions sampler;

  void validate() const;
};

/// Sampler-ratio MDP over one PINN training run. State is log10 of the mean
/// squared residual on each sampler's candidate set plus k / K.
class MixtureEnv {
 public:
  static constexpr int kStateDim = samplers::kSamplerCount + 1;
  static constexpr int kActionDim = samplers::kSamplerCount;

  struct StepResult {
    Eigen::VectorXd next_state;
    double reward = 0.0;
    bool done = false;
    bool diverged = false;
    /// Mean squared residual and solution error on the fresh evaluation set.
    double pde_residual = 0.0;
    double pinn_error = 0.0;
    std::array<int, samplers::kSamplerCount> counts{};
  };

  MixtureEnv(std::shared_ptr<const pde::PdeProblem> problem, const MixtureEnvConfig& config, std::uint64_t seed);

  const Eigen::VectorXd& state() const { return state_; }
  int step_index() const { return k_; }
  bool done() const { return k_ >= config_.resample_steps || diverged_; }
  const pde::PinnModel& model() const { return model_; }
  const std::array<double, samplers::kSamplerCount>& candidate_residuals() const { return residuals_; }

  /// Compose the collocation set by `ratio`, run `cadence` Adam steps, then score.
  StepResult step(const samplers::RatioVector& ratio);

 private:
  void draw_candidates();

  std::shared_ptr<const pde::PdeProblem> problem_;
  MixtureEnvConfig config_;
  pde::PinnModel model_;
  pde::PinnEvaluator eval_;
  samplers::SamplerBank bank_;
  nn::AdamState adam_;
  Rng mix_rng_;
  Rng boundary_rng_;
  Rng eval_rng_;
  std::array<Eigen::MatrixXd, samplers::kSamplerCount> pools_;
  std::array<double, samplers::kSamplerCount> residuals_{};
  std::vector<double> grad_;
  int k_ = 0;
  bool diverged_ = false;
  Eigen::VectorXd state_;
};

}  // namespace harvest::rl
