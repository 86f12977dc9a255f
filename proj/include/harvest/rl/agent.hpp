#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "harvest/common/rng.hpp"
#include "harvest/rl/network.hpp"
#include "harvest/rl/replay.hpp"

namespace harvest::rl {

enum class AgentKind { kTd3, kSac };

std::string to_string(AgentKind k);
/// "td3" or "sac"; throws ConfigError otherwise.
AgentKind agent_kind_from_string(const std::string& name);

struct AgentConfig {
  double gamma = 0.99;
  std::size_t buffer = 100000;
  int batch = 256;
  std::vector<int> hidden{64, 64};
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double tau = 0.005;
  // TD3
  double policy_noise = 0.2;
  double noise_clip = 0.5;
  double exploration_noise = 0.1;
  int policy_delay = 2;
  // SAC
  double initial_temperature = 0.2;
  bool learn_temperature = true;
  double temperature_lr = 3e-4;
  /// NaN means -action_dim.
  double target_entropy = std::numeric_limits<double>::quiet_NaN();

  void validate() const;
};

struct UpdateStats {
  /// False when the buffer holds fewer than `batch` transitions; nothing changed.
  bool ready = false;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  bool actor_updated = false;
  double temperature = 0.0;
};

/// Deterministic actor plus state normalizer, enough to act without training.
struct PolicyCheckpoint {
  AgentKind kind = AgentKind::kTd3;
  int state_dim = 0;
  int action_dim = 0;
  nn::MlpSpec actor_spec;
  std::vector<double> actor_params;
  RunningNorm norm;
  nlohmann::json meta = nlohmann::json::object();
};

inline constexpr int kPolicyCheckpointVersion = 1;

nlohmann::json to_json(const PolicyCheckpoint& c);
PolicyCheckpoint policy_from_json(const nlohmann::json& j);
void save_policy(const std::filesystem::path& path, const PolicyCheckpoint& c);
/// Throws CheckpointError naming the path when the file is missing or invalid.
PolicyCheckpoint load_policy(const std::filesystem::path& path);

/// Frozen policy: tanh of the first action_dim actor outputs.
class Policy {
 public:
  explicit Policy(PolicyCheckpoint c);
  Eigen::VectorXd act(const Eigen::VectorXd& state);
  const PolicyCheckpoint& checkpoint() const { return ckpt_; }

 private:
  PolicyCheckpoint ckpt_;
  Network actor_;
};

/// Off-policy actor-critic over raw actions in [-1, 1]^action_dim. States
/// pass through the agent's RunningNorm before every network.
class Agent {
 public:
  Agent(int state_dim, int action_dim, const AgentConfig& config, bool normalize_states);
  virtual ~Agent() = default;

  virtual AgentKind kind() const = 0;
  /// explore adds Gaussian noise (TD3) or samples the policy (SAC); otherwise the
  /// deterministic action. Always inside [-1, 1].
  virtual Eigen::VectorXd act(const Eigen::VectorXd& state, bool explore, Rng& rng) = 0;
  /// One gradient update from a minibatch of `buffer`.
  virtual UpdateStats update(const ReplayBuffer& buffer, Rng& rng) = 0;

  void observe_state(const Eigen::VectorXd& s) { norm_.observe(s); }
  const RunningNorm& norm() const { return norm_; }
  PolicyCheckpoint checkpoint() const;

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const AgentConfig& config() const { return config_; }
  virtual Network& actor() = 0;
  virtual const Network& actor() const = 0;

 protected:
  Eigen::MatrixXd joint(const Eigen::MatrixXd& S, const Eigen::MatrixXd& A) const;

  int state_dim_;
  int action_dim_;
  AgentConfig config_;
  RunningNorm norm_;
};

class Td3Agent final : public Agent {
 public:
  Td3Agent(int state_dim, int action_dim, const AgentConfig& config, std::uint64_t seed, bool normalize_states = false);

  AgentKind kind() const override { return AgentKind::kTd3; }
  Eigen::VectorXd act(const Eigen::VectorXd& state, bool explore, Rng& rng) override;
  UpdateStats update(const ReplayBuffer& buffer, Rng& rng) override;

  /// Critic regression toward r + gamma (1 - d) min Q'(s', smoothed pi'(s')). Returns the mean loss.
  double update_critics(const Batch& b, Rng& rng);
  /// Deterministic policy gradient through critic 1. Returns -mean Q1.
  double update_actor(const Batch& b);
  void update_targets(double tau);

  Network& actor() override { return actor_; }
  const Network& actor() const override { return actor_; }
  Network& critic(int i) { return i == 0 ? q1_ : q2_; }
  const Network& target_actor() const { return actor_t_; }
  const Network& target_critic(int i) const { return i == 0 ? q1_t_ : q2_t_; }
  std::uint64_t updates() const { return updates_; }

 private:
  Network actor_, actor_t_, q1_, q2_, q1_t_, q2_t_;
  std::uint64_t updates_ = 0;
};

class SacAgent final : public Agent {
 public:
  SacAgent(int state_dim, int action_dim, const AgentConfig& config, std::uint64_t seed, bool normalize_states = false);

  AgentKind kind() const override { return AgentKind::kSac; }
  Eigen::VectorXd act(const Eigen::VectorXd& state, bool explore, Rng& rng) override;
  UpdateStats update(const ReplayBuffer& buffer, Rng& rng) override;

  double update_critics(const Batch& b, Rng& rng);
  /// Reparameterized actor step on mean(temperature * log pi - min Q). Returns that loss.
  double update_actor(const Batch& b, Rng& rng);
  void update_targets(double tau);

  double temperature() const { return std::exp(log_temperature_); }
  void set_temperature(double t);
  /// Monte Carlo estimate of the policy entropy at `state`.
  double entropy(const Eigen::VectorXd& state, int samples, Rng& rng);

  Network& actor() override { return actor_; }
  const Network& actor() const override { return actor_; }
  Network& critic(int i) { return i == 0 ? q1_ : q2_; }
  const Network& target_critic(int i) const { return i == 0 ? q1_t_ : q2_t_; }

 private:
  struct Sample {
    Eigen::MatrixXd action;
    Eigen::VectorXd log_prob;
    Eigen::MatrixXd noise;
    Eigen::MatrixXd log_std;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> clamped;
  };
  Sample sample_actions(const Eigen::MatrixXd& normalized_states, Rng& rng);

  Network actor_, q1_, q2_, q1_t_, q2_t_;
  double log_temperature_;
  double target_entropy_;
  nn::AdamState temperature_adam_;
};

std::unique_ptr<Agent> make_agent(AgentKind kind, int state_dim, int action_dim, const AgentConfig& config,
                                  std::uint64_t seed, bool normalize_states);

}  // namespace harvest::rl
