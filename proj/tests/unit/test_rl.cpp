#include <cmath>
#include <filesystem>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "harvest/common/error.hpp"
#include "harvest/pde/problem.hpp"
#include "harvest/rl/agent.hpp"
#include "harvest/rl/environments.hpp"

using namespace harvest;
using namespace harvest::rl;

namespace {

Transition make_transition(int sd, int ad, double tag, bool done = false) {
  return {Eigen::VectorXd::Constant(sd, tag), Eigen::VectorXd::Constant(ad, 0.0), tag,
          Eigen::VectorXd::Constant(sd, tag + 1), done};
}

std::size_t hash_params(const std::vector<double>& p) {
  std::size_t h = 1469598103934665603ull;
  for (double v : p) {
    h ^= std::hash<double>{}(v);
    h *= 1099511628211ull;
  }
  return h;
}

// One-step bandit with reward -(a - 0.37)^2; returns the final deterministic action.
double run_bandit(Agent& agent, int updates, std::uint64_t seed) {
  ReplayBuffer buffer(100000, 1, 1);
  Rng rng = make_rng(seed, "bandit");
  const Eigen::VectorXd s = Eigen::VectorXd::Zero(1);
  int done_updates = 0;
  while (done_updates < updates) {
    const Eigen::VectorXd a = agent.act(s, true, rng);
    buffer.push({s, a, -(a[0] - 0.37) * (a[0] - 0.37), s, true});
    if (agent.update(buffer, rng).ready) ++done_updates;
  }
  return agent.act(s, false, rng)[0];
}

}  // namespace

TEST_CASE("replay buffer is FIFO at capacity") {
  ReplayBuffer b(3, 2, 1);
  for (int i = 0; i < 5; ++i) b.push(make_transition(2, 1, i));
  CHECK(b.size() == 3);
  CHECK(b[0].reward == 2.0);
  CHECK(b[1].reward == 3.0);
  CHECK(b[2].reward == 4.0);
  CHECK_THROWS_AS(b[3], DimensionError);
  CHECK_THROWS_AS(b.push(make_transition(3, 1, 0)), DimensionError);
  Transition bad = make_transition(2, 1, 0);
  bad.reward = std::nan("");
  CHECK_THROWS_AS(b.push(bad), DimensionError);
  ReplayBuffer empty(3, 2, 1);
  Rng rng(1);
  CHECK_THROWS_AS(empty.sample_indices(1, rng), SamplingError);
}

TEST_CASE("replay sampling is uniform over held transitions") {
  const int n = 50;
  ReplayBuffer b(n, 1, 1);
  for (int i = 0; i < n + 7; ++i) b.push(make_transition(1, 1, i));
  Rng rng = make_rng(3, "test");
  std::vector<double> counts(n, 0.0);
  const int draws = 100000;
  for (std::size_t i : b.sample_indices(draws, rng)) counts[i] += 1.0;
  const double expect = static_cast<double>(draws) / n;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expect) * (c - expect) / expect;
  const boost::math::chi_squared dist(n - 1);
  CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.01);

  const Batch batch = b.gather({0, n - 1});
  CHECK(batch.rewards[0] == 7.0);
  CHECK(batch.rewards[1] == n + 6.0);
  CHECK(batch.next_states(0, 1) == n + 7.0);
}

TEST_CASE("updates before the buffer is ready change nothing") {
  AgentConfig cfg;
  cfg.batch = 8;
  Td3Agent td3(2, 1, cfg, 1);
  SacAgent sac(2, 1, cfg, 1);
  ReplayBuffer b(100, 2, 1);
  for (int i = 0; i < 7; ++i) b.push(make_transition(2, 1, i));
  Rng rng(0);
  const auto before = td3.actor().params;
  CHECK_FALSE(td3.update(b, rng).ready);
  CHECK_FALSE(sac.update(b, rng).ready);
  CHECK(td3.actor().params == before);
  CHECK(td3.updates() == 0);
  b.push(make_transition(2, 1, 7));
  CHECK(td3.update(b, rng).ready);
}

TEST_CASE("polyak averaging") {
  Network a(nn::MlpSpec::tanh_mlp(2, {4}, 1), 1, 1e-3);
  Network b(nn::MlpSpec::tanh_mlp(2, {4}, 1), 2, 1e-3);
  Network c = b;
  c.polyak_from(a, 1.0);
  CHECK(c.params == a.params);
  Network d = b;
  d.polyak_from(a, 0.25);
  for (std::size_t i = 0; i < d.params.size(); ++i) {
    CHECK(d.params[i] == 0.25 * a.params[i] + 0.75 * b.params[i]);
  }
  Network e(nn::MlpSpec::tanh_mlp(3, {4}, 1), 2, 1e-3);
  CHECK_THROWS_AS(e.polyak_from(a, 0.5), DimensionError);
}

TEST_CASE("targets move only through polyak steps") {
  AgentConfig cfg;
  cfg.batch = 16;
  cfg.tau = 0.1;
  Td3Agent agent(2, 1, cfg, 4);
  ReplayBuffer b(100, 2, 1);
  for (int i = 0; i < 40; ++i) b.push(make_transition(2, 1, 0.01 * i, i % 3 == 0));
  Rng rng(5);
  const auto t_actor = agent.target_actor().params;
  const auto t_q1 = agent.target_critic(0).params;
  const std::size_t h_actor = hash_params(t_actor);
  const std::size_t h_q1 = hash_params(t_q1);
  const std::size_t h_q2 = hash_params(agent.target_critic(1).params);
  const auto st = agent.update(b, rng);  // critic-only step under policy delay 2
  CHECK_FALSE(st.actor_updated);
  CHECK(hash_params(agent.target_actor().params) == h_actor);
  CHECK(hash_params(agent.target_critic(0).params) == h_q1);
  CHECK(hash_params(agent.target_critic(1).params) == h_q2);
  CHECK(agent.critic(0).params != t_q1);
  const auto st2 = agent.update(b, rng);
  CHECK(st2.actor_updated);
  for (std::size_t i = 0; i < t_q1.size(); ++i) {
    CHECK(agent.target_critic(0).params[i] == 0.1 * agent.critic(0).params[i] + 0.9 * t_q1[i]);
  }
  for (std::size_t i = 0; i < t_actor.size(); ++i) {
    CHECK(agent.target_actor().params[i] == 0.1 * agent.actor().params[i] + 0.9 * t_actor[i]);
  }
}

TEST_CASE("critic regresses onto known targets with gamma = 0") {
  AgentConfig cfg;
  cfg.gamma = 0.0;
  cfg.critic_lr = 1e-3;
  Td3Agent agent(2, 1, cfg, 7);
  ReplayBuffer b(2000, 2, 1);
  Rng rng = make_rng(8, "test");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    Transition t;
    t.state = Eigen::Vector2d(u(rng), u(rng));
    t.action = Eigen::VectorXd::Constant(1, u(rng));
    t.reward = std::sin(2.0 * t.state[0]) + 0.5 * t.action[0] * t.action[0] - 0.3 * t.state[1] * t.action[0];
    t.next_state = Eigen::Vector2d(u(rng), u(rng));
    t.done = i % 2 == 0;
    b.push(t);
  }
  for (int step = 0; step < 2000; ++step) agent.update_critics(b.sample(cfg.batch, rng), rng);
  std::vector<std::size_t> all(b.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Batch full = b.gather(all);
  Eigen::MatrixXd X(3, full.size());
  X.topRows(2) = full.states;
  X.bottomRows(1) = full.actions;
  const Eigen::VectorXd q = agent.critic(0).forward(X).row(0).transpose();
  const double mse = (q - full.rewards).squaredNorm() / full.size();
  CHECK(mse < 1e-3);
}

TEST_CASE("TD3 and SAC solve the calibration bandit") {
  AgentConfig cfg;
  Td3Agent td3(1, 1, cfg, 0);
  CHECK(std::abs(run_bandit(td3, 5000, 0) - 0.37) < 0.05);
  SacAgent sac(1, 1, cfg, 0);
  Rng rng = make_rng(1, "entropy");
  const Eigen::VectorXd s = Eigen::VectorXd::Zero(1);
  const double h0 = sac.entropy(s, 4000, rng);
  CHECK(std::abs(run_bandit(sac, 10000, 0) - 0.37) < 0.05);
  CHECK(sac.entropy(s, 4000, rng) < h0);
}

TEST_CASE("SAC at zero temperature follows the deterministic policy gradient") {
  AgentConfig cfg;
  cfg.learn_temperature = false;
  cfg.initial_temperature = 0.0;
  cfg.critic_lr = 1e-3;
  SacAgent agent(1, 1, cfg, 3);
  CHECK(agent.temperature() == 0.0);
  ReplayBuffer b(5000, 1, 1);
  Rng rng = make_rng(2, "test");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::VectorXd s = Eigen::VectorXd::Zero(1);
  for (int i = 0; i < 5000; ++i) {
    const double a = u(rng);
    b.push({s, Eigen::VectorXd::Constant(1, a), -(a - 0.37) * (a - 0.37), s, true});
  }
  for (int i = 0; i < 1500; ++i) agent.update_critics(b.sample(256, rng), rng);
  const double a0 = agent.act(s, false, rng)[0];
  REQUIRE(std::abs(a0 - 0.37) > 0.05);
  agent.update_actor(b.sample(256, rng), rng);
  const double a1 = agent.act(s, false, rng)[0];
  CHECK((a1 - a0) * (0.37 - a0) > 0.0);
}

TEST_CASE("actions respect their bounds") {
  AgentConfig cfg;
  Td3Agent td3(3, 1, cfg, 2);
  SacAgent sac(6, 5, cfg, 2);
  Rng rng = make_rng(9, "test");
  std::normal_distribution<double> n(0.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd s3(3), s6(6);
    for (auto& v : s3) v = n(rng);
    for (auto& v : s6) v = n(rng);
    for (bool explore : {true, false}) {
      const double alpha = alpha_from_action(td3.act(s3, explore, rng)[0]);
      CHECK(alpha >= 1.1);
      CHECK(alpha <= 2.0);
      const Eigen::VectorXd ratio = simplex_from_action(sac.act(s6, explore, rng));
      CHECK(std::abs(ratio.sum() - 1.0) <= 1e-9);
      CHECK(ratio.minCoeff() >= 0.0);
    }
  }
  CHECK(alpha_from_action(-1.0) == 1.1);
  CHECK(alpha_from_action(1.0) == 2.0);
  CHECK(alpha_from_action(7.0) == 2.0);
  CHECK(alpha_from_action(0.0) == doctest::Approx(1.55));
  const Eigen::VectorXd extreme = (Eigen::VectorXd(5) << 300, -300, 0, 1e3, -1e3).finished();
  CHECK(std::abs(simplex_from_action(extreme).sum() - 1.0) <= 1e-9);
  const Eigen::VectorXd flat = simplex_from_action(Eigen::VectorXd::Zero(5));
  const auto uniform = samplers::RatioVector::uniform();
  for (int i = 0; i < 5; ++i) CHECK(flat[i] == uniform.a[i]);
}

TEST_CASE("untrained actors start near the centre of the action range") {
  AgentConfig cfg;
  Rng rng = make_rng(4, "test");
  std::normal_distribution<double> n(0.0, 3.0);
  for (AgentKind kind : {AgentKind::kTd3, AgentKind::kSac}) {
    auto lyap = make_agent(kind, 3, 1, cfg, 7, false);
    auto pinn = make_agent(kind, 6, 5, cfg, 7, false);
    for (int i = 0; i < 50; ++i) {
      Eigen::VectorXd s3(3), s6(6);
      for (auto& v : s3) v = n(rng);
      for (auto& v : s6) v = n(rng);
      CHECK(std::abs(alpha_from_action(lyap->act(s3, false, rng)[0]) - 1.55) < 0.01);
      const Eigen::VectorXd w = simplex_from_action(pinn->act(s6, false, rng));
      CHECK((w.array() - 0.2).abs().maxCoeff() < 0.03);
    }
  }
}

TEST_CASE("deterministic actions are repeatable") {
  AgentConfig cfg;
  for (AgentKind kind : {AgentKind::kTd3, AgentKind::kSac}) {
    auto agent = make_agent(kind, 4, 2, cfg, 11, false);
    Rng r1(1), r2(2);
    const Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(4, -1, 1);
    CHECK(agent->act(s, false, r1) == agent->act(s, false, r2));
  }
}

TEST_CASE("policy checkpoint round trip") {
  AgentConfig cfg;
  cfg.batch = 4;
  const auto dir = std::filesystem::temp_directory_path() / "harvest_test_policy";
  std::filesystem::create_directories(dir);
  for (AgentKind kind : {AgentKind::kTd3, AgentKind::kSac}) {
    auto agent = make_agent(kind, 6, 5, cfg, 5, true);
    Rng rng(3);
    ReplayBuffer b(100, 6, 5);
    for (int i = 0; i < 10; ++i) {
      Eigen::VectorXd s = Eigen::VectorXd::Random(6) * 3.0;
      agent->observe_state(s);
      b.push({s, agent->act(s, true, rng), 0.1 * i, s, false});
    }
    for (int i = 0; i < 5; ++i) agent->update(b, rng);
    const auto path = dir / ("policy_" + to_string(kind) + ".json");
    auto ckpt = agent->checkpoint();
    ckpt.meta["episodes"] = 3;
    save_policy(path, ckpt);
    Policy loaded(load_policy(path));
    CHECK(loaded.checkpoint().meta["episodes"] == 3);
    CHECK(loaded.checkpoint().norm.mean == agent->norm().mean);
    for (int i = 0; i < 5; ++i) {
      const Eigen::VectorXd s = Eigen::VectorXd::Random(6);
      CHECK(loaded.act(s) == agent->act(s, false, rng));
    }
  }
  CHECK_THROWS_WITH_AS(load_policy(dir / "missing.json"), doctest::Contains("missing.json"), CheckpointError);
  auto j = to_json(make_agent(AgentKind::kTd3, 2, 1, cfg, 1, false)->checkpoint());
  j["version"] = 99;
  CHECK_THROWS_AS(policy_from_json(j), CheckpointError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("running normalizer statistics") {
  RunningNorm norm(2, true);
  const std::vector<Eigen::Vector2d> xs{{1, 10}, {2, 20}, {3, 30}, {6, 0}};
  for (const auto& x : xs) norm.observe(x);
  CHECK(norm.mean[0] == doctest::Approx(3.0));
  CHECK(norm.mean[1] == doctest::Approx(15.0));
  CHECK(norm.variance()[0] == doctest::Approx(3.5));
  CHECK(norm.variance()[1] == doctest::Approx(125.0));
  const Eigen::VectorXd z = norm.apply(Eigen::Vector2d(3.0, 15.0 + std::sqrt(125.0)));
  CHECK(z[0] == doctest::Approx(0.0));
  CHECK(z[1] == doctest::Approx(1.0));
  CHECK(norm.apply(Eigen::Vector2d(1e9, 0))[0] == 10.0);
  RunningNorm off(2, false);
  off.observe(Eigen::Vector2d(5, 5));
  CHECK(off.apply(Eigen::Vector2d(5, 7)) == Eigen::Vector2d(5, 7));
}

TEST_CASE("reward arithmetic") {
  CHECK(pinn_reward(0.0) == doctest::Approx(8.0));
  CHECK(pinn_reward(1e-2) == doctest::Approx(-std::log10(1e-2 + 1e-8)));
  CHECK(lyapunov_reward(0.3, 0.3) == 0.0);
  CHECK(lyapunov_reward(0.30, 0.42) == doctest::Approx(0.12));
}

TEST_CASE("expansion environment runs the level-set loop") {
  lyapunov::RoaConfig cfg;
  cfg.batch = 100;
  cfg.inner_iterations = 2;
  cfg.adam_steps = 5;
  const auto ctrl = lyapunov::lqr_controller(cfg.pendulum);
  auto grid = std::make_shared<const lyapunov::RoaGrid>(lyapunov::compute_roa_grid(cfg.pendulum, ctrl, cfg.box, 31));
  ExpansionEnv env(cfg, grid, ctrl, 4, 3);
  lyapunov::RoaSession reference(cfg, grid, ctrl, 3);
  CHECK(env.state().size() == ExpansionEnv::kStateDim);
  int steps = 0;
  double total = 0.0;
  const double start = env.safe_set_fraction();
  while (!env.done()) {
    const auto r = env.step(1.4);
    const auto expect = reference.advance(1.4);
    CHECK(r.info.level == expect.level);
    CHECK(r.info.safe_set_fraction == expect.safe_set_fraction);
    for (Eigen::Index i = 0; i < r.next_state.size(); ++i) {
      CHECK(r.next_state[i] >= 0.0);
      CHECK(r.next_state[i] <= 1.0);
    }
    total += r.reward;
    ++steps;
  }
  CHECK(steps == 4);
  CHECK(env.state()[1] == 1.0);
  CHECK(total == doctest::Approx(env.safe_set_fraction() - start).epsilon(1e-12));
  CHECK_THROWS(env.step(1.4));
}

TEST_CASE("mixture environment composes, trains and scores") {
  auto problem = std::make_shared<const pde::PdeProblem>(pde::make_diffusion(1.0));
  MixtureEnvConfig cfg;
  cfg.cadence = 20;
  cfg.resample_steps = 3;
  cfg.eval_points = 200;
  cfg.sampler.rad_pool = 500;
  MixtureEnv a(problem, cfg, 4);
  MixtureEnv b(problem, cfg, 4);
  CHECK(a.state().size() == MixtureEnv::kStateDim);
  CHECK(a.state().allFinite());
  CHECK(a.state()[5] == 0.0);
  const auto uniform = samplers::RatioVector::uniform();
  int steps = 0;
  while (!a.done()) {
    const auto ra = a.step(uniform);
    const auto rb = b.step(uniform);
    for (int c : ra.counts) CHECK(c == 10);
    CHECK(ra.reward == rb.reward);
    CHECK(ra.pinn_error == rb.pinn_error);
    CHECK(ra.reward == doctest::Approx(pinn_reward(ra.pinn_error)));
    CHECK(ra.pde_residual > 0.0);
    ++steps;
  }
  CHECK(steps == 3);
  CHECK(a.model().params == b.model().params);
  CHECK_THROWS(a.step(uniform));

  MixtureEnv c(problem, cfg, 4);
  samplers::RatioVector bad;
  bad.a = {0.5, 0.5, 0.5, 0, 0};
  CHECK_THROWS_AS(c.step(bad), SamplingError);
  const auto one_hot = c.step(samplers::RatioVector::one_hot(samplers::SamplerId::kRandom));
  CHECK(one_hot.counts[1] == 50);
}

TEST_CASE("divergent inner training ends the episode with the floor reward") {
  auto problem = std::make_shared<const pde::PdeProblem>(pde::make_diffusion(1.0));
  MixtureEnvConfig cfg;
  cfg.cadence = 50;
  cfg.resample_steps = 3;
  cfg.lr = 1e300;
  cfg.sampler.rad_pool = 200;
  MixtureEnv env(problem, cfg, 1);
  const auto r = env.step(samplers::RatioVector::uniform());
  CHECK(r.diverged);
  CHECK(r.reward == kDivergenceReward);
  CHECK(r.done);
  CHECK(env.done());
}
