#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "harvest/lyapunov/level_set.hpp"
#include "harvest/pde/reference.hpp"
#include "harvest/rl/agent.hpp"
#include "harvest/rl/environments.hpp"

namespace harvest::harness {

enum class EnvId { kLyapunov, kDiffusion, kWave, kBurgers };

std::string to_string(EnvId env);
/// Throws ConfigError on an unknown name.
EnvId env_from_string(const std::string& name);
inline bool is_pinn(EnvId env) { return env != EnvId::kLyapunov; }

/// Bounds of the expansion multiplier for agents and the fixed-alpha sweep.
inline constexpr double kAlphaMin = 1.1;
inline constexpr double kAlphaMax = 2.0;

struct AgentSettings {
  /// "td3" or "sac".
  rl::AgentKind kind = rl::AgentKind::kTd3;
  rl::AgentConfig agent;
  /// Gradient updates after each environment step.
  int updates_per_step = 10;
  /// Standardize the state with running statistics.
  bool normalize_state = true;
};

struct LyapunovSettings {
  lyapunov::PendulumParams pendulum;
  /// Training draws l uniformly from [length_min, length_max]; evaluation uses pendulum.length.
  double length_min = 0.35;
  double length_max = 0.65;
  lyapunov::StateBox box;
  std::vector<int> feature_hidden{64, 64};
  int feature_out = 64;
  double epsilon = 1e-3;
  int batch = 500;
  int horizon = 100;
  /// Total classifier iterations and level-update cadence; iterations / cadence resample steps.
  int iterations = 100;
  int cadence = 10;
  int adam_steps = 10;
  double lr = 1e-3;
  double initial_box_fraction = 0.1;
  int grid_resolution = 101;
  int grid_horizon = 2000;
  double grid_tolerance = 1e-2;
  std::vector<double> baseline_alphas{1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};

  int resample_steps() const { return iterations / cadence; }
  lyapunov::RoaConfig roa_config(double length) const;
};

struct PinnSettings {
  int interior = 50;
  int boundary = 50;
  /// Total Adam iterations and resample cadence; iterations / cadence resample steps.
  int iterations = 10000;
  int cadence = 1000;
  double lr = 1e-3;
  int eval_points = 1000;
  std::vector<int> hidden{32, 32, 32};
  /// Training draws z from z_values when nonempty, else uniformly from [z_min, z_max].
  double z_min = 1.0;
  double z_max = 3.0;
  std::vector<double> z_values;
  double z_test = 2.0;
  double simplex_temperature = 3.0;
  samplers::SamplerOptions sampler;
  pde::ReferenceBudget reference;
  /// Subset of uniform_grid, random, sobol, halton, rad, mixture.
  std::vector<std::string> baseline_selectors{"uniform_grid", "random", "sobol", "halton", "rad", "mixture"};

  int resample_steps() const { return iterations / cadence; }
  rl::MixtureEnvConfig env_config() const;
};

struct ExperimentConfig {
  EnvId env = EnvId::kDiffusion;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int episodes = 500;
  /// Evaluate the current policy every this many training episodes; 0 disables.
  int eval_every_episodes = 0;
  AgentSettings agent;
  LyapunovSettings lyapunov;
  PinnSettings pinn;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

ExperimentConfig default_config(EnvId env);

/// Complete JSON form; only the section for the config's env is emitted.
nlohmann::json to_json(const ExperimentConfig& config);

/// Parse a possibly partial config. "env" is required; every other key must
/// exist in the defaults for that env and have the same type. Missing keys
/// take defaults. Overrides are "dotted.key=value" with a JSON value
/// (bare words are taken as strings) applied after the file.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace harvest::harness
