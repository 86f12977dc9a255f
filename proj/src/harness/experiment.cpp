#include "harvest/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "harvest/common/error.hpp"
#include "harvest/common/format.hpp"
#include "harvest/lyapunov/roa.hpp"
#include "harvest/pde/reference.hpp"
#include "harvest/rl/network.hpp"
#include "harvest/rl/replay.hpp"

namespace harvest::harness {

namespace {

void emit(const RowContext& rows, int step, long inner, const char* metric, double value) {
  if (rows.writer == nullptr) return;
  rows.writer->write({rows.run_id, rows.seed, rows.episode, step, inner, metric, value});
}

samplers::RatioVector to_ratio(const Eigen::VectorXd& w) {
  samplers::RatioVector r;
  for (int i = 0; i < samplers::kSamplerCount; ++i) r.a[i] = w[i];
  return r;
}

void say(const Log& log, const std::string& line) {
  if (log) log(line);
}

}  // namespace

Resources::Resources(const ExperimentConfig& config, std::filesystem::path cache_dir, Log log)
    : config_(config), cache_dir_(std::move(cache_dir)), log_(std::move(log)) {}

Resources::Dynamics Resources::dynamics(double length) {
  if (auto it = dynamics_.find(length); it != dynamics_.end()) return it->second;
  const auto& s = config_.lyapunov;
  lyapunov::PendulumParams p = s.pendulum;
  p.length = length;
  p.validate();
  Dynamics d;
  d.ctrl = lyapunov::lqr_controller(p);
  const bool keep = length == s.pendulum.length;
  if (keep) {
    say(log_, "roa grid for l=" + format_double(length));
    d.grid = std::make_shared<const lyapunov::RoaGrid>(lyapunov::load_or_compute_roa_grid(
        p, d.ctrl, s.box, cache_dir_, s.grid_resolution, s.grid_horizon, s.grid_tolerance));
    dynamics_.emplace(length, d);
  } else {
    d.grid = std::make_shared<const lyapunov::RoaGrid>(
        lyapunov::compute_roa_grid(p, d.ctrl, s.box, s.grid_resolution, s.grid_horizon, s.grid_tolerance));
  }
  return d;
}

std::shared_ptr<const pde::PdeProblem> Resources::problem(double z) {
  if (auto it = problems_.find(z); it != problems_.end()) return it->second;
  auto p = std::make_shared<pde::PdeProblem>(pde::make_problem(to_string(config_.env), z));
  if (!p->has_reference()) {
    const auto& budget = config_.pinn.reference;
    const auto path = pde::reference_cache_path(cache_dir_, *p, budget);
    if (!std::filesystem::exists(path)) {
      say(log_, "training reference for " + p->name + " z=" + format_double(z) + " (" +
                    std::to_string(budget.steps) + " steps)");
    }
    const Log log = log_;
    const int every = std::max(1, budget.steps / 10);
    auto result = pde::load_or_train_reference(*p, budget, cache_dir_, [&log, every](int step, double loss) {
      if (step % every == 0) say(log, "  reference step " + std::to_string(step) + " loss " + format_double(loss));
    });
    p->reference = std::make_shared<const pde::PinnModel>(std::move(result.model));
  }
  std::shared_ptr<const pde::PdeProblem> out = std::move(p);
  const auto& zs = config_.pinn.z_values;
  if (!out->has_exact() || z == config_.pinn.z_test || std::find(zs.begin(), zs.end(), z) != zs.end()) {
    problems_.emplace(z, out);
  }
  return out;
}

EpisodeRecord run_lyapunov_episode(const LyapunovSettings& settings, const Resources::Dynamics& dynamics,
                                   double length, std::uint64_t env_seed, const AlphaDecider& decide,
                                   const StepObserver& observe, const RowContext& rows) {
  rl::ExpansionEnv env(settings.roa_config(length), dynamics.grid, dynamics.ctrl, settings.resample_steps(),
                       env_seed);
  EpisodeRecord rec;
  while (!env.done()) {
    const Eigen::VectorXd state = env.state();
    const int k = env.step_index();
    const double alpha = decide(state);
    if (!(alpha >= 1.0)) throw ConfigError("expansion multiplier " + format_double(alpha) + " is below 1");
    const auto r = env.step(alpha);
    rec.rewards.push_back(r.reward);
    rec.episode_return += r.reward;
    rec.alphas.push_back(alpha);
    rec.safe_ratios.push_back(r.info.safe_ratio);
    rec.diverged = rec.diverged || r.diverged;
    const long inner = static_cast<long>(k + 1) * settings.cadence;
    emit(rows, k, inner, "alpha", alpha);
    emit(rows, k, inner, "safe_ratio", r.info.safe_ratio);
    emit(rows, k, inner, "safe_set_fraction", r.info.safe_set_fraction);
    emit(rows, k, inner, "level", r.info.level);
    emit(rows, k, inner, "level_fraction", r.info.level_fraction);
    emit(rows, k, inner, "reward", r.reward);
    if (r.diverged) emit(rows, k, inner, "diverged", 1.0);
    if (observe) observe(state, r.next_state, r.reward, r.done);
  }
  rec.final_metric = env.safe_set_fraction();
  return rec;
}

EpisodeRecord run_pinn_episode(const PinnSettings& settings, std::shared_ptr<const pde::PdeProblem> problem,
                               std::uint64_t env_seed, const RatioDecider& decide, const StepObserver& observe,
                               const RowContext& rows) {
  rl::MixtureEnv env(std::move(problem), settings.env_config(), env_seed);
  EpisodeRecord rec;
  while (!env.done()) {
    const Eigen::VectorXd state = env.state();
    const int k = env.step_index();
    const samplers::RatioVector ratio = decide(state);
    const auto r = env.step(ratio);
    rec.rewards.push_back(r.reward);
    rec.episode_return += r.reward;
    rec.ratios.push_back(ratio);
    rec.diverged = rec.diverged || r.diverged;
    rec.final_metric = r.pinn_error;
    const long inner = static_cast<long>(k + 1) * settings.cadence;
    static const char* kRatioNames[] = {"ratio_1", "ratio_2", "ratio_3", "ratio_4", "ratio_5"};
    for (int i = 0; i < samplers::kSamplerCount; ++i) emit(rows, k, inner, kRatioNames[i], ratio.a[i]);
    emit(rows, k, inner, "pde_residual", r.pde_residual);
    emit(rows, k, inner, "pinn_error", r.pinn_error);
    emit(rows, k, inner, "reward", r.reward);
    if (r.diverged) emit(rows, k, inner, "diverged", 1.0);
    if (observe) observe(state, r.next_state, r.reward, r.done);
  }
  return rec;
}

std::uint64_t evaluation_seed(std::uint64_t seed) { return substream_seed(seed, "evaluation"); }

double late_safe_ratio(const EpisodeRecord& record) {
  const auto& v = record.safe_ratios;
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t start = v.size() / 2;
  return std::accumulate(v.begin() + static_cast<long>(start), v.end(), 0.0) / static_cast<double>(v.size() - start);
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw Error("mean of an empty set");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

namespace {

using EpisodeFn = std::function<EpisodeRecord(std::uint64_t env_seed, const RowContext& rows)>;

MethodSummary evaluate_method(const ExperimentConfig& config, const std::string& run_id, int episode,
                              MetricsSink* writer, const Log& log, const EpisodeFn& run) {
  MethodSummary s;
  s.run_id = run_id;
  for (std::uint64_t seed : config.seeds) {
    const RowContext rows{writer, run_id, seed, episode};
    const EpisodeRecord rec = run(evaluation_seed(seed), rows);
    s.final_metric.push_back(rec.final_metric);
    s.late_safe_ratio.push_back(late_safe_ratio(rec));
    s.diverged.push_back(rec.diverged);
    if (writer != nullptr) {
      const long inner = config.env == EnvId::kLyapunov ? config.lyapunov.iterations : config.pinn.iterations;
      writer->write({run_id, seed, episode, -1, inner, "episode_return", rec.episode_return});
      writer->write({run_id, seed, episode, -1, inner,
                     config.env == EnvId::kLyapunov ? "final_safe_set_fraction" : "final_pinn_error",
                     rec.final_metric});
      if (config.env == EnvId::kLyapunov) {
        writer->write({run_id, seed, episode, -1, inner, "late_safe_ratio", late_safe_ratio(rec)});
      }
      writer->flush();
    }
    say(log, run_id + " seed " + std::to_string(seed) + ": " +
                 (config.env == EnvId::kLyapunov ? "safe-set fraction " : "error ") + format_double(rec.final_metric));
  }
  return s;
}

EpisodeFn test_episode(const ExperimentConfig& config, Resources& resources, std::function<double(const Eigen::VectorXd&)> alpha,
                       std::function<samplers::RatioVector(const Eigen::VectorXd&)> ratio) {
  if (config.env == EnvId::kLyapunov) {
    const double length = config.lyapunov.pendulum.length;
    return [&config, &resources, alpha, length](std::uint64_t env_seed, const RowContext& rows) {
      return run_lyapunov_episode(config.lyapunov, resources.dynamics(length), length, env_seed, alpha, {}, rows);
    };
  }
  return [&config, &resources, ratio](std::uint64_t env_seed, const RowContext& rows) {
    return run_pinn_episode(config.pinn, resources.problem(config.pinn.z_test), env_seed, ratio, {}, rows);
  };
}

}  // namespace

MethodSummary evaluate_policy(const ExperimentConfig& config, Resources& resources, rl::Policy& policy,
                              MetricsSink* writer, const Log& log, const std::string& run_id, int episode) {
  const auto& ck = policy.checkpoint();
  const bool lyap = config.env == EnvId::kLyapunov;
  const int sd = lyap ? rl::ExpansionEnv::kStateDim : rl::MixtureEnv::kStateDim;
  const int ad = lyap ? rl::ExpansionEnv::kActionDim : rl::MixtureEnv::kActionDim;
  if (ck.state_dim != sd || ck.action_dim != ad) {
    throw CheckpointError("policy has state/action dims " + std::to_string(ck.state_dim) + "/" +
                          std::to_string(ck.action_dim) + ", env " + to_string(config.env) + " needs " +
                          std::to_string(sd) + "/" + std::to_string(ad));
  }
  const double temperature = config.pinn.simplex_temperature;
  auto alpha = [&policy](const Eigen::VectorXd& s) { return rl::alpha_from_action(policy.act(s)[0], kAlphaMin, kAlphaMax); };
  auto ratio = [&policy, temperature](const Eigen::VectorXd& s) {
    return to_ratio(rl::simplex_from_action(policy.act(s), temperature));
  };
  return evaluate_method(config, run_id, episode, writer, log, test_episode(config, resources, alpha, ratio));
}

samplers::RatioVector selector_ratio(const std::string& selector) {
  if (selector == "mixture") return samplers::RatioVector::uniform();
  return samplers::RatioVector::one_hot(samplers::sampler_from_string(selector));
}

std::vector<MethodSummary> run_baselines(const ExperimentConfig& config, Resources& resources, MetricsSink* writer,
                                         const Log& log) {
  std::vector<MethodSummary> out;
  if (config.env == EnvId::kLyapunov) {
    for (double a : config.lyapunov.baseline_alphas) {
      if (a < kAlphaMin || a > kAlphaMax) throw ConfigError("baseline alpha " + format_double(a) + " outside [1.1, 2.0]");
      auto alpha = [a](const Eigen::VectorXd&) { return a; };
      out.push_back(evaluate_method(config, "alpha_" + format_double(a), 0, writer, log,
                                    test_episode(config, resources, alpha, {})));
    }
  } else {
    for (const auto& sel : config.pinn.baseline_selectors) {
      const samplers::RatioVector r = selector_ratio(sel);
      auto ratio = [r](const Eigen::VectorXd&) { return r; };
      out.push_back(evaluate_method(config, sel, 0, writer, log, test_episode(config, resources, {}, ratio)));
    }
  }
  return out;
}

TrainResult train_agent(const ExperimentConfig& config, Resources& resources, MetricsSink* writer, const Log& log) {
  config.validate();
  const std::uint64_t seed = config.seeds.front();
  const bool lyap = config.env == EnvId::kLyapunov;
  const int sd = lyap ? rl::ExpansionEnv::kStateDim : rl::MixtureEnv::kStateDim;
  const int ad = lyap ? rl::ExpansionEnv::kActionDim : rl::MixtureEnv::kActionDim;
  auto agent = rl::make_agent(config.agent.kind, sd, ad, config.agent.agent, substream_seed(seed, "agent"),
                              config.agent.normalize_state);
  rl::ReplayBuffer buffer(config.agent.agent.buffer, sd, ad);
  Rng env_rng = make_rng(seed, "train.env");
  Rng explore_rng = make_rng(seed, "train.explore");
  Rng update_rng = make_rng(seed, "train.update");
  const double temperature = config.pinn.simplex_temperature;

  TrainResult result;
  for (int e = 0; e < config.episodes; ++e) {
    Eigen::VectorXd last_action;
    double critic_sum = 0.0;
    double actor_sum = 0.0;
    int critic_n = 0;
    int actor_n = 0;
    double temp = 0.0;
    auto observe = [&](const Eigen::VectorXd& s, const Eigen::VectorXd& next, double reward, bool done) {
      buffer.push({s, last_action, reward, next, done});
      for (int u = 0; u < config.agent.updates_per_step; ++u) {
        const rl::UpdateStats st = agent->update(buffer, update_rng);
        if (!st.ready) break;
        critic_sum += st.critic_loss;
        ++critic_n;
        if (st.actor_updated) {
          actor_sum += st.actor_loss;
          ++actor_n;
        }
        temp = st.temperature;
      }
    };
    auto act = [&](const Eigen::VectorXd& s) {
      agent->observe_state(s);
      last_action = agent->act(s, true, explore_rng);
      return last_action;
    };
    const std::uint64_t env_seed = substream_seed(seed, "train.episode." + std::to_string(e));
    const RowContext rows{writer, "train", seed, e};
    EpisodeRecord rec;
    double param = 0.0;
    if (lyap) {
      const auto& s = config.lyapunov;
      param = std::uniform_real_distribution<double>(s.length_min, s.length_max)(env_rng);
      const auto dyn = resources.dynamics(param);
      rec = run_lyapunov_episode(
          s, dyn, param, env_seed,
          [&](const Eigen::VectorXd& st) { return rl::alpha_from_action(act(st)[0], kAlphaMin, kAlphaMax); },
          observe, rows);
    } else {
      const auto& p = config.pinn;
      if (p.z_values.empty()) {
        param = std::uniform_real_distribution<double>(p.z_min, p.z_max)(env_rng);
      } else {
        param = p.z_values[std::uniform_int_distribution<std::size_t>(0, p.z_values.size() - 1)(env_rng)];
      }
      rec = run_pinn_episode(
          p, resources.problem(param), env_seed,
          [&](const Eigen::VectorXd& st) { return to_ratio(rl::simplex_from_action(act(st), temperature)); }, observe,
          rows);
    }
    result.episode_returns.push_back(rec.episode_return);
    if (writer != nullptr) {
      const long inner = lyap ? config.lyapunov.iterations : config.pinn.iterations;
      auto row = [&](const char* metric, double v) { writer->write({"train", seed, e, -1, inner, metric, v}); };
      row(lyap ? "length" : "z", param);
      row("episode_return", rec.episode_return);
      row(lyap ? "final_safe_set_fraction" : "final_pinn_error", rec.final_metric);
      if (critic_n > 0) row("critic_loss", critic_sum / critic_n);
      if (actor_n > 0) row("actor_loss", actor_sum / actor_n);
      if (critic_n > 0 && config.agent.kind == rl::AgentKind::kSac) row("temperature", temp);
      writer->flush();
    }
    say(log, "episode " + std::to_string(e + 1) + "/" + std::to_string(config.episodes) + " " +
                 (lyap ? "l=" : "z=") + format_double(param) + " return " + format_double(rec.episode_return) +
                 (lyap ? " fraction " : " error ") + format_double(rec.final_metric));
    if (config.eval_every_episodes > 0 && (e + 1) % config.eval_every_episodes == 0) {
      rl::Policy policy(agent->checkpoint());
      evaluate_policy(config, resources, policy, writer, log, "eval", e + 1);
    }
  }
  result.checkpoint = agent->checkpoint();
  result.checkpoint.meta = {{"env", to_string(config.env)},
                            {"episodes", config.episodes},
                            {"seed", seed},
                            {"library_version", library_version()}};
  return result;
}

}  // namespace harvest::harness
