#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "harvest/harness/config.hpp"
#include "harvest/harness/metrics.hpp"
#include "harvest/rl/agent.hpp"

namespace harvest::harness {

/// Progress lines; the CLI sends them to stderr.
using Log = std::function<void(const std::string&)>;

/// Dynamics, ground-truth grids and PDE instances shared across episodes.
/// Test-parameter grids and Burgers references go through the disk cache.
class Resources {
 public:
  struct Dynamics {
    lyapunov::LinearController ctrl;
    std::shared_ptr<const lyapunov::RoaGrid> grid;
  };

  Resources(const ExperimentConfig& config, std::filesystem::path cache_dir, Log log = {});

  /// LQR controller and ground-truth grid for pole length `length`.
  /// Only the test length is kept and cached on disk.
  Dynamics dynamics(double length);
  /// PDE instance for `z`; Burgers instances carry a trained reference.
  std::shared_ptr<const pde::PdeProblem> problem(double z);

  const std::filesystem::path& cache_dir() const { return cache_dir_; }

 private:
  ExperimentConfig config_;
  std::filesystem::path cache_dir_;
  Log log_;
  std::map<double, Dynamics> dynamics_;
  std::map<double, std::shared_ptr<const pde::PdeProblem>> problems_;
};

/// Where an episode's rows go. A null writer records nothing.
struct RowContext {
  MetricsSink* writer = nullptr;
  std::string run_id;
  std::uint64_t seed = 0;
  int episode = 0;
};

struct EpisodeRecord {
  std::vector<double> rewards;
  double episode_return = 0.0;
  bool diverged = false;
  /// Safe-set fraction (Lyapunov) or relative L2 error (PINN) after the last step.
  double final_metric = 0.0;
  /// Lyapunov only: per-step safe-sample ratio and applied alpha.
  std::vector<double> safe_ratios;
  std::vector<double> alphas;
  /// PINN only: per-step mixture weights.
  std::vector<samplers::RatioVector> ratios;
};

using AlphaDecider = std::function<double(const Eigen::VectorXd& state)>;
using RatioDecider = std::function<samplers::RatioVector(const Eigen::VectorXd& state)>;
/// Called after every step with (state, next_state, reward, done).
using StepObserver =
    std::function<void(const Eigen::VectorXd& state, const Eigen::VectorXd& next, double reward, bool done)>;

/// Rows per step: alpha, safe_ratio, safe_set_fraction, level, level_fraction, reward.
EpisodeRecord run_lyapunov_episode(const LyapunovSettings& settings, const Resources::Dynamics& dynamics,
                                   double length, std::uint64_t env_seed, const AlphaDecider& decide,
                                   const StepObserver& observe = {}, const RowContext& rows = {});

/// Rows per step: ratio_1 .. ratio_5 (uniform_grid, random, sobol, halton, rad),
/// pde_residual, pinn_error, reward.
EpisodeRecord run_pinn_episode(const PinnSettings& settings, std::shared_ptr<const pde::PdeProblem> problem,
                               std::uint64_t env_seed, const RatioDecider& decide, const StepObserver& observe = {},
                               const RowContext& rows = {});

/// Environment seed of evaluation episodes for run seed `seed`, shared by
/// policies and baselines so they face identical randomness.
std::uint64_t evaluation_seed(std::uint64_t seed);

/// Mean safe-sample ratio over the second half of the resample steps.
double late_safe_ratio(const EpisodeRecord& record);

/// Per-seed outcome of one evaluated method, in config seed order.
struct MethodSummary {
  std::string run_id;
  std::vector<double> final_metric;
  std::vector<double> late_safe_ratio;
  std::vector<bool> diverged;
};

double median(std::vector<double> v);
double mean(const std::vector<double>& v);

/// Deterministic policy on the test parameter for every config seed. Rows use run_id "policy".
MethodSummary evaluate_policy(const ExperimentConfig& config, Resources& resources, rl::Policy& policy,
                              MetricsSink* writer, const Log& log = {}, const std::string& run_id = "policy",
                              int episode = 0);

/// Fixed-alpha sweep (Lyapunov) or sampler selectors (PINN) on the test
/// parameter for every config seed. Run ids are "alpha_<a>" or the selector name.
std::vector<MethodSummary> run_baselines(const ExperimentConfig& config, Resources& resources, MetricsSink* writer,
                                         const Log& log = {});

/// Ratio used by a named PINN baseline selector.
samplers::RatioVector selector_ratio(const std::string& selector);

struct TrainResult {
  rl::PolicyCheckpoint checkpoint;
  std::vector<double> episode_returns;
};

/// Trains one agent with run seed config.seeds[0] on randomized training
/// parameters. With 0 episodes the untrained policy is returned. Training
/// rows use run_id "train"; periodic evaluations use "eval".
TrainResult train_agent(const ExperimentConfig& config, Resources& resources, MetricsSink* writer,
                        const Log& log = {});

}  // namespace harvest::harness
