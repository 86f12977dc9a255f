#include "harvest/rl/environments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "harvest/common/error.hpp"
#include "harvest/pde/collocation.hpp"

namespace harvest::rl {

double pinn_reward(double error) { return -std::log10(error + 1e-8); }

ExpansionEnv::ExpansionEnv(const lyapunov::RoaConfig& config, std::shared_ptr<const lyapunov::RoaGrid> grid,
                           const lyapunov::LinearController& ctrl, int resample_steps, std::uint64_t seed)
    : session_(config, std::move(grid), ctrl, seed), steps_(resample_steps), state_(kStateDim) {
  if (resample_steps < 1) throw ConfigError("resample steps must be positive");
  state_ << 1.0, 0.0, session_.level_fraction();
}

ExpansionEnv::StepResult ExpansionEnv::step(double alpha) {
  if (done()) throw Error("expansion episode already finished");
  StepResult out;
  const double before = session_.safe_set_fraction();
  try {
    out.info = session_.advance(alpha);
  } catch (const DivergenceError&) {
    out.diverged = true;
  } catch (const SamplingError&) {
    out.diverged = true;
  }
  ++k_;
  if (out.diverged) {
    diverged_ = true;
    out.reward = kDivergenceReward;
    out.info.alpha = alpha;
    out.info.level = session_.level();
    out.info.safe_set_fraction = session_.safe_set_fraction();
    out.info.level_fraction = session_.level_fraction();
    state_[1] = static_cast<double>(k_) / steps_;
  } else {
    out.reward = lyapunov_reward(before, out.info.safe_set_fraction);
    state_ << out.info.safe_ratio, static_cast<double>(k_) / steps_, out.info.level_fraction;
  }
  out.next_state = state_;
  out.done = done();
  return out;
}

void MixtureEnvConfig::validate() const {
  if (interior < 1 || boundary < 1) throw ConfigError("collocation counts must be positive");
  if (resample_steps < 1 || cadence < 1) throw ConfigError("resample steps and cadence must be positive");
  if (!(lr > 0.0)) throw ConfigError("PINN learning rate must be positive");
  if (eval_points < 1) throw ConfigError("evaluation point count must be positive");
  spec.validate();
}

MixtureEnv::MixtureEnv(std::shared_ptr<const pde::PdeProblem> problem, const MixtureEnvConfig& config,
                       std::uint64_t seed)
    : problem_(std::move(problem)),
      config_(config),
      model_(pde::make_pinn_model(*problem_, substream_seed(seed, "pinn.init"), config.spec)),
      eval_(*problem_, config.spec),
      bank_(problem_->domain, substream_seed(seed, "pinn.samplers"), config.sampler),
      adam_(model_.params.size(), {.lr = config.lr}),
      mix_rng_(make_rng(seed, "pinn.mixture")),
      boundary_rng_(make_rng(seed, "pinn.boundary")),
      eval_rng_(make_rng(seed, "pinn.eval")),
      grad_(model_.params.size()),
      state_(kStateDim) {
  config_.validate();
  draw_candidates();
}

void MixtureEnv::draw_candidates() {
  const samplers::ResidualFn residual = [this](const Eigen::MatrixXd& pts) {
    return eval_.residuals(model_, pts).cwiseAbs().eval();
  };
  for (samplers::SamplerId id : samplers::all_samplers()) {
    const int j = static_cast<int>(id);
    pools_[j] = bank_.sample(id, config_.interior, residual);
    residuals_[j] = samplers::residual_summary(eval_, model_, pools_[j]);
    state_[j] = std::log10(residuals_[j] + 1e-12);
  }
  state_[samplers::kSamplerCount] = static_cast<double>(k_) / config_.resample_steps;
}

MixtureEnv::StepResult MixtureEnv::step(const samplers::RatioVector& ratio) {
  if (done()) throw Error("PINN episode already finished");
  ratio.validate();
  StepResult out;
  samplers::Mixture mix = samplers::compose_mixture(ratio, pools_, config_.interior, mix_rng_);
  out.counts = mix.counts;
  pde::CollocationSet colloc;
  colloc.interior = std::move(mix.points);
  colloc.boundary = pde::sample_boundary(*problem_, config_.boundary, boundary_rng_);
  for (int it = 0; it < config_.cadence && !diverged_; ++it) {
    std::fill(grad_.begin(), grad_.end(), 0.0);
    const double loss = eval_.loss(model_, colloc, grad_);
    if (!std::isfinite(loss)) {
      diverged_ = true;
      break;
    }
    try {
      nn::adam_step(model_.params, grad_, adam_);
    } catch (const DivergenceError&) {
      diverged_ = true;
    }
  }
  ++k_;
  if (!diverged_) {
    const Eigen::MatrixXd test = pde::uniform_interior(problem_->domain, config_.eval_points, eval_rng_);
    const Eigen::VectorXd r = eval_.residuals(model_, test);
    out.pde_residual = r.squaredNorm() / static_cast<double>(r.size());
    out.pinn_error = pde::solution_error(*problem_, model_, test);
    diverged_ = !std::isfinite(out.pde_residual) || !std::isfinite(out.pinn_error);
  }
  if (diverged_) {
    out.diverged = true;
    out.reward = kDivergenceReward;
    out.pde_residual = std::numeric_limits<double>::quiet_NaN();
    out.pinn_error = std::numeric_limits<double>::quiet_NaN();
    state_[samplers::kSamplerCount] = static_cast<double>(k_) / config_.resample_steps;
  } else {
    out.reward = pinn_reward(out.pinn_error);
    if (k_ < config_.resample_steps) {
      draw_candidates();
    } else {
      state_[samplers::kSamplerCount] = 1.0;
    }
  }
  out.next_state = state_;
  out.done = done();
  return out;
}

}  // namespace harvest::rl
