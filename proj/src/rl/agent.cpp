#include "harvest/rl/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "harvest/common/error.hpp"
#include "harvest/nn/checkpoint.hpp"

namespace harvest::rl {

namespace {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
constexpr double kSquashEps = 1e-6;

void check_finite(double loss, const char* what) {
  if (!std::isfinite(loss)) throw DivergenceError(std::string(what) + " loss is not finite");
}

double mean_squared_error(const Eigen::MatrixXd& q, const Eigen::VectorXd& y, Eigen::MatrixXd& grad) {
  const double n = static_cast<double>(y.size());
  const Eigen::RowVectorXd diff = q.row(0) - y.transpose();
  grad = 2.0 * diff / n;
  return diff.squaredNorm() / n;
}

}  // namespace

std::string to_string(AgentKind k) { return k == AgentKind::kTd3 ? "td3" : "sac"; }

AgentKind agent_kind_from_string(const std::string& name) {
  if (name == "td3") return AgentKind::kTd3;
  if (name == "sac") return AgentKind::kSac;
  throw ConfigError("unknown agent '" + name + "' (expected td3 or sac)");
}

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (buffer == 0 || batch <= 0) throw ConfigError("replay buffer and batch must be positive");
  if (hidden.empty()) throw ConfigError("agent networks need at least one hidden layer");
  for (int h : hidden) {
    if (h <= 0) throw ConfigError("hidden widths must be positive");
  }
  if (!(actor_lr > 0.0 && critic_lr > 0.0 && temperature_lr > 0.0)) throw ConfigError("learning rates must be positive");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("polyak tau must lie in (0, 1]");
  if (policy_noise < 0.0 || noise_clip < 0.0 || exploration_noise < 0.0) throw ConfigError("noise scales must be >= 0");
  if (policy_delay < 1) throw ConfigError("policy delay must be at least 1");
  if (!(initial_temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
}

nlohmann::json to_json(const PolicyCheckpoint& c) {
  nlohmann::json norm = {{"enabled", c.norm.enabled}, {"count", c.norm.count}};
  norm["mean"] = std::vector<double>(c.norm.mean.data(), c.norm.mean.data() + c.norm.mean.size());
  norm["m2"] = std::vector<double>(c.norm.m2.data(), c.norm.m2.data() + c.norm.m2.size());
  return {{"format", "harvest.policy"},
          {"version", kPolicyCheckpointVersion},
          {"agent", to_string(c.kind)},
          {"state_dim", c.state_dim},
          {"action_dim", c.action_dim},
          {"actor", nn::to_json(c.actor_spec, c.actor_params)},
          {"norm", norm},
          {"meta", c.meta}};
}

PolicyCheckpoint policy_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "harvest.policy") throw CheckpointError("not a policy checkpoint");
    const int version = j.at("version").get<int>();
    if (version != kPolicyCheckpointVersion) {
      throw CheckpointError("policy checkpoint version " + std::to_string(version) + ", expected " +
                            std::to_string(kPolicyCheckpointVersion));
    }
    PolicyCheckpoint c;
    c.kind = agent_kind_from_string(j.at("agent").get<std::string>());
    c.state_dim = j.at("state_dim").get<int>();
    c.action_dim = j.at("action_dim").get<int>();
    auto actor = nn::mlp_from_json(j.at("actor"));
    c.actor_spec = actor.spec;
    c.actor_params = std::move(actor.params);
    const int outputs = c.kind == AgentKind::kSac ? 2 * c.action_dim : c.action_dim;
    if (c.actor_spec.input_dim() != c.state_dim || c.actor_spec.output_dim() != outputs) {
      throw CheckpointError("actor shape does not match the declared state/action dimensions");
    }
    const auto& n = j.at("norm");
    c.norm.enabled = n.at("enabled").get<bool>();
    c.norm.count = n.at("count").get<double>();
    const auto mean = n.at("mean").get<std::vector<double>>();
    const auto m2 = n.at("m2").get<std::vector<double>>();
    if (static_cast<int>(mean.size()) != c.state_dim || static_cast<int>(m2.size()) != c.state_dim) {
      throw CheckpointError("normalizer width does not match the state dimension");
    }
    c.norm.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), c.state_dim);
    c.norm.m2 = Eigen::Map<const Eigen::VectorXd>(m2.data(), c.state_dim);
    c.meta = j.value("meta", nlohmann::json::object());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed policy checkpoint: ") + e.what());
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(std::string("invalid policy checkpoint: ") + e.what());
  }
}

void save_policy(const std::filesystem::path& path, const PolicyCheckpoint& c) {
  nn::write_json_file(path, to_json(c));
}

PolicyCheckpoint load_policy(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw CheckpointError("policy checkpoint not found: " + path.string());
  try {
    return policy_from_json(nn::read_json_file(path));
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

Policy::Policy(PolicyCheckpoint c) : ckpt_(std::move(c)), actor_(ckpt_.actor_spec, 0, 1e-3) {
  actor_.params = ckpt_.actor_params;
}

Eigen::VectorXd Policy::act(const Eigen::VectorXd& state) {
  if (state.size() != ckpt_.state_dim) throw DimensionError("policy state width mismatch");
  const Eigen::MatrixXd& out = actor_.forward(ckpt_.norm.apply(state));
  return out.col(0).head(ckpt_.action_dim).array().tanh().matrix();
}

Agent::Agent(int state_dim, int action_dim, const AgentConfig& config, bool normalize_states)
    : state_dim_(state_dim), action_dim_(action_dim), config_(config), norm_(state_dim, normalize_states) {
  if (state_dim <= 0 || action_dim <= 0) throw DimensionError("agent dimensions must be positive");
  config_.validate();
}

PolicyCheckpoint Agent::checkpoint() const {
  PolicyCheckpoint c;
  c.kind = kind();
  c.state_dim = state_dim_;
  c.action_dim = action_dim_;
  c.actor_spec = actor().spec();
  c.actor_params = actor().params;
  c.norm = norm_;
  return c;
}

Eigen::MatrixXd Agent::joint(const Eigen::MatrixXd& S, const Eigen::MatrixXd& A) const {
  Eigen::MatrixXd X(S.rows() + A.rows(), S.cols());
  X.topRows(S.rows()) = S;
  X.bottomRows(A.rows()) = A;
  return X;
}

Td3Agent::Td3Agent(int state_dim, int action_dim, const AgentConfig& config, std::uint64_t seed,
                   bool normalize_states)
    : Agent(state_dim, action_dim, config, normalize_states),
      actor_(with_small_output_layer(Network(nn::MlpSpec::tanh_mlp(state_dim, config.hidden, action_dim),
                                             substream_seed(seed, "td3.actor"), config.actor_lr),
                                     substream_seed(seed, "td3.actor.output"))),
      actor_t_(actor_),
      q1_(nn::MlpSpec::tanh_mlp(state_dim + action_dim, config.hidden, 1), substream_seed(seed, "td3.q1"),
          config.critic_lr),
      q2_(nn::MlpSpec::tanh_mlp(state_dim + action_dim, config.hidden, 1), substream_seed(seed, "td3.q2"),
          config.critic_lr),
      q1_t_(q1_),
      q2_t_(q2_) {}

Eigen::VectorXd Td3Agent::act(const Eigen::VectorXd& state, bool explore, Rng& rng) {
  if (state.size() != state_dim_) throw DimensionError("agent state width mismatch");
  Eigen::VectorXd a = actor_.forward(norm_.apply(state)).col(0).array().tanh().matrix();
  if (explore) {
    std::normal_distribution<double> n(0.0, config_.exploration_noise);
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] += n(rng);
  }
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

double Td3Agent::update_critics(const Batch& b, Rng& rng) {
  const Eigen::MatrixXd S = norm_.apply_columns(b.states);
  const Eigen::MatrixXd S2 = norm_.apply_columns(b.next_states);
  Eigen::MatrixXd A2 = actor_t_.forward(S2).array().tanh().matrix();
  std::normal_distribution<double> n(0.0, config_.policy_noise);
  for (Eigen::Index k = 0; k < A2.size(); ++k) {
    A2(k) = std::clamp(A2(k) + std::clamp(n(rng), -config_.noise_clip, config_.noise_clip), -1.0, 1.0);
  }
  const Eigen::MatrixXd X2 = joint(S2, A2);
  const Eigen::RowVectorXd t1 = q1_t_.forward(X2).row(0);
  const Eigen::RowVectorXd t2 = q2_t_.forward(X2).row(0);
  const Eigen::VectorXd y =
      b.rewards.array() + config_.gamma * (1.0 - b.done.array()) * t1.cwiseMin(t2).transpose().array();

  const Eigen::MatrixXd X = joint(S, b.actions);
  double loss = 0.0;
  Eigen::MatrixXd g;
  for (Network* q : {&q1_, &q2_}) {
    loss += mean_squared_error(q->forward(X), y, g);
    q->zero_grad();
    q->backward(g);
    q->apply_gradient();
  }
  check_finite(loss, "TD3 critic");
  return 0.5 * loss;
}

double Td3Agent::update_actor(const Batch& b) {
  const Eigen::MatrixXd S = norm_.apply_columns(b.states);
  const Eigen::MatrixXd A = actor_.forward(S).array().tanh().matrix();
  const Eigen::MatrixXd X = joint(S, A);
  const double n = static_cast<double>(b.size());
  const double loss = -q1_.forward(X).mean();
  check_finite(loss, "TD3 actor");
  Eigen::MatrixXd gx;
  q1_.backward(Eigen::MatrixXd::Constant(1, b.size(), -1.0 / n), &gx);
  q1_.zero_grad();
  const Eigen::MatrixXd ga = gx.bottomRows(action_dim_).array() * (1.0 - A.array().square());
  actor_.forward(S);
  actor_.zero_grad();
  actor_.backward(ga);
  actor_.apply_gradient();
  return loss;
}

void Td3Agent::update_targets(double tau) {
  actor_t_.polyak_from(actor_, tau);
  q1_t_.polyak_from(q1_, tau);
  q2_t_.polyak_from(q2_, tau);
}

UpdateStats Td3Agent::update(const ReplayBuffer& buffer, Rng& rng) {
  UpdateStats st;
  if (!buffer.ready(config_.batch)) return st;
  st.ready = true;
  const Batch b = buffer.sample(config_.batch, rng);
  st.critic_loss = update_critics(b, rng);
  ++updates_;
  if (updates_ % static_cast<std::uint64_t>(config_.policy_delay) == 0) {
    st.actor_loss = update_actor(b);
    st.actor_updated = true;
    update_targets(config_.tau);
  }
  return st;
}

SacAgent::SacAgent(int state_dim, int action_dim, const AgentConfig& config, std::uint64_t seed,
                   bool normalize_states)
    : Agent(state_dim, action_dim, config, normalize_states),
      actor_(with_small_output_layer(Network(nn::MlpSpec::tanh_mlp(state_dim, config.hidden, 2 * action_dim),
                                             substream_seed(seed, "sac.actor"), config.actor_lr),
                                     substream_seed(seed, "sac.actor.output"))),
      q1_(nn::MlpSpec::tanh_mlp(state_dim + action_dim, config.hidden, 1), substream_seed(seed, "sac.q1"),
          config.critic_lr),
      q2_(nn::MlpSpec::tanh_mlp(state_dim + action_dim, config.hidden, 1), substream_seed(seed, "sac.q2"),
          config.critic_lr),
      q1_t_(q1_),
      q2_t_(q2_),
      log_temperature_(config.initial_temperature > 0.0 ? std::log(config.initial_temperature)
                                                        : -std::numeric_limits<double>::infinity()),
      target_entropy_(std::isnan(config.target_entropy) ? -static_cast<double>(action_dim) : config.target_entropy),
      temperature_adam_(1, {.lr = config.temperature_lr}) {}

void SacAgent::set_temperature(double t) {
  if (!(t >= 0.0)) throw ConfigError("temperature must be >= 0");
  log_temperature_ = t > 0.0 ? std::log(t) : -std::numeric_limits<double>::infinity();
}

SacAgent::Sample SacAgent::sample_actions(const Eigen::MatrixXd& S, Rng& rng) {
  const Eigen::MatrixXd& out = actor_.forward(S);
  const int d = action_dim_;
  const Eigen::Index n = S.cols();
  Sample s;
  const Eigen::ArrayXXd raw_log_std = out.bottomRows(d).array();
  s.clamped = (raw_log_std < kLogStdMin) || (raw_log_std > kLogStdMax);
  s.log_std = raw_log_std.max(kLogStdMin).min(kLogStdMax).matrix();
  s.noise.resize(d, n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index k = 0; k < s.noise.size(); ++k) s.noise(k) = normal(rng);
  const Eigen::ArrayXXd pre = out.topRows(d).array() + s.log_std.array().exp() * s.noise.array();
  s.action = pre.tanh().matrix();
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Eigen::ArrayXXd terms = -0.5 * s.noise.array().square() - s.log_std.array() - half_log_2pi -
                                (1.0 - s.action.array().square() + kSquashEps).log();
  s.log_prob = terms.colwise().sum().transpose().matrix();
  return s;
}

Eigen::VectorXd SacAgent::act(const Eigen::VectorXd& state, bool explore, Rng& rng) {
  if (state.size() != state_dim_) throw DimensionError("agent state width mismatch");
  const Eigen::MatrixXd S = norm_.apply(state);
  if (!explore) return actor_.forward(S).col(0).head(action_dim_).array().tanh().matrix();
  return sample_actions(S, rng).action.col(0);
}

double SacAgent::update_critics(const Batch& b, Rng& rng) {
  const Eigen::MatrixXd S = norm_.apply_columns(b.states);
  const Eigen::MatrixXd S2 = norm_.apply_columns(b.next_states);
  const Sample next = sample_actions(S2, rng);
  const Eigen::MatrixXd X2 = joint(S2, next.action);
  const Eigen::RowVectorXd t1 = q1_t_.forward(X2).row(0);
  const Eigen::RowVectorXd t2 = q2_t_.forward(X2).row(0);
  const double temp = temperature();
  const Eigen::ArrayXd soft = t1.cwiseMin(t2).transpose().array() - temp * next.log_prob.array();
  const Eigen::VectorXd y = b.rewards.array() + config_.gamma * (1.0 - b.done.array()) * soft;
  const Eigen::MatrixXd X = joint(S, b.actions);
  double loss = 0.0;
  Eigen::MatrixXd g;
  for (Network* q : {&q1_, &q2_}) {
    loss += mean_squared_error(q->forward(X), y, g);
    q->zero_grad();
    q->backward(g);
    q->apply_gradient();
  }
  check_finite(loss, "SAC critic");
  return 0.5 * loss;
}

double SacAgent::update_actor(const Batch& b, Rng& rng) {
  const Eigen::MatrixXd S = norm_.apply_columns(b.states);
  const Sample s = sample_actions(S, rng);
  const int d = action_dim_;
  const Eigen::Index n = S.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::MatrixXd X = joint(S, s.action);
  const Eigen::RowVectorXd v1 = q1_.forward(X).row(0);
  Eigen::MatrixXd g1;
  q1_.backward(Eigen::MatrixXd::Constant(1, n, 1.0), &g1);
  const Eigen::RowVectorXd v2 = q2_.forward(X).row(0);
  Eigen::MatrixXd g2;
  q2_.backward(Eigen::MatrixXd::Constant(1, n, 1.0), &g2);
  q1_.zero_grad();
  q2_.zero_grad();
  const double temp = temperature();

  Eigen::MatrixXd dq(d, n);
  double loss = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const bool first = v1[k] <= v2[k];
    dq.col(k) = first ? g1.col(k).tail(d) : g2.col(k).tail(d);
    loss += temp * s.log_prob[k] - std::min(v1[k], v2[k]);
  }
  loss *= inv_n;
  check_finite(loss, "SAC actor");

  const Eigen::ArrayXXd a = s.action.array();
  const Eigen::ArrayXXd one_minus = 1.0 - a.square();
  const Eigen::ArrayXXd sigma = s.log_std.array().exp();
  // d log pi / d pre for the squashing correction; the Gaussian part is constant in pre at fixed noise.
  const Eigen::ArrayXXd dlogp_dpre = 2.0 * a * one_minus / (one_minus + kSquashEps);
  const Eigen::ArrayXXd dq_dpre = dq.array() * one_minus;
  const Eigen::ArrayXXd d_pre = inv_n * (temp * dlogp_dpre - dq_dpre);
  Eigen::ArrayXXd d_log_std = d_pre * sigma * s.noise.array() - inv_n * temp;
  d_log_std = s.clamped.select(0.0, d_log_std);

  Eigen::MatrixXd grad_out(2 * d, n);
  grad_out.topRows(d) = d_pre.matrix();
  grad_out.bottomRows(d) = d_log_std.matrix();
  actor_.forward(S);
  actor_.zero_grad();
  actor_.backward(grad_out);
  actor_.apply_gradient();

  if (config_.learn_temperature && std::isfinite(log_temperature_)) {
    const double g = -(s.log_prob.array() + target_entropy_).mean();
    double lt[1] = {log_temperature_};
    const double gt[1] = {g};
    nn::adam_step(lt, gt, temperature_adam_);
    log_temperature_ = lt[0];
  }
  return loss;
}

void SacAgent::update_targets(double tau) {
  q1_t_.polyak_from(q1_, tau);
  q2_t_.polyak_from(q2_, tau);
}

UpdateStats SacAgent::update(const ReplayBuffer& buffer, Rng& rng) {
  UpdateStats st;
  if (!buffer.ready(config_.batch)) return st;
  st.ready = true;
  const Batch b = buffer.sample(config_.batch, rng);
  st.critic_loss = update_critics(b, rng);
  st.actor_loss = update_actor(b, rng);
  st.actor_updated = true;
  update_targets(config_.tau);
  st.temperature = temperature();
  return st;
}

double SacAgent::entropy(const Eigen::VectorXd& state, int samples, Rng& rng) {
  const Eigen::MatrixXd S = norm_.apply(state).replicate(1, samples);
  return -sample_actions(S, rng).log_prob.mean();
}

std::unique_ptr<Agent> make_agent(AgentKind kind, int state_dim, int action_dim, const AgentConfig& config,
                                  std::uint64_t seed, bool normalize_states) {
  if (kind == AgentKind::kTd3) return std::make_unique<Td3Agent>(state_dim, action_dim, config, seed, normalize_states);
  return std::make_unique<SacAgent>(state_dim, action_dim, config, seed, normalize_states);
}

}  // namespace harvest::rl
