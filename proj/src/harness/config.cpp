#include "harvest/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "harvest/common/error.hpp"
#include "harvest/nn/checkpoint.hpp"

namespace harvest::harness {

using nlohmann::json;

namespace {

const char* kEnvNames[] = {"lyapunov", "diffusion", "wave", "burgers"};

bool kind_compatible(const json& def, const json& val) {
  if (def.is_null()) return val.is_null() || val.is_number();
  if (def.is_number_float()) return val.is_number();
  if (def.is_number_unsigned()) return val.is_number_unsigned() || (val.is_number_integer() && val.get<long long>() >= 0);
  if (def.is_number_integer()) return val.is_number_integer();
  return def.type() == val.type();
}

// Every key in `val` must exist in `def` with a compatible type.
void check_against(const json& def, const json& val, const std::string& path) {
  const std::string where = path.empty() ? "config" : path;
  if (def.is_object()) {
    if (!val.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = val.begin(); it != val.end(); ++it) {
      const std::string sub = path.empty() ? it.key() : path + "." + it.key();
      if (!def.contains(it.key())) throw ConfigError("unknown key " + sub);
      check_against(def.at(it.key()), it.value(), sub);
    }
    return;
  }
  if (def.is_array()) {
    if (!val.is_array()) throw ConfigError(where + ": expected an array");
    if (def.empty()) {
      for (const auto& e : val) {
        if (!e.is_number()) throw ConfigError(where + ": expected numbers");
      }
      return;
    }
    for (std::size_t i = 0; i < val.size(); ++i) check_against(def.front(), val[i], where + "[" + std::to_string(i) + "]");
    return;
  }
  if (!kind_compatible(def, val)) {
    throw ConfigError(where + ": expected " + std::string(def.is_null() ? "number or null" : def.type_name()) +
                      ", got " + val.type_name());
  }
}

json parse_override_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    if (!node->is_object()) *node = json::object();
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = parse_override_value(assignment.substr(eq + 1));
}

json reference_json(const pde::ReferenceBudget& b) {
  return {{"interior", b.interior},
          {"boundary", b.boundary},
          {"steps", b.steps},
          {"batch_interior", b.batch_interior},
          {"batch_boundary", b.batch_boundary},
          {"lr", b.lr},
          {"final_lr", b.final_lr},
          {"seed", b.seed}};
}

std::vector<int> hidden_of(const nn::MlpSpec& spec) {
  return {spec.widths.begin() + 1, spec.widths.end() - 1};
}

}  // namespace

std::string to_string(EnvId env) { return kEnvNames[static_cast<int>(env)]; }

EnvId env_from_string(const std::string& name) {
  for (int i = 0; i < 4; ++i) {
    if (name == kEnvNames[i]) return static_cast<EnvId>(i);
  }
  throw ConfigError("unknown env '" + name + "' (lyapunov, diffusion, wave, burgers)");
}

lyapunov::RoaConfig LyapunovSettings::roa_config(double length) const {
  lyapunov::RoaConfig c;
  c.pendulum = pendulum;
  c.pendulum.length = length;
  c.box = box;
  c.feature = nn::MlpSpec::tanh_mlp(2, feature_hidden, feature_out);
  c.epsilon = epsilon;
  c.batch = batch;
  c.horizon = horizon;
  c.inner_iterations = cadence;
  c.adam_steps = adam_steps;
  c.lr = lr;
  c.initial_box_fraction = initial_box_fraction;
  c.grid_resolution = grid_resolution;
  c.grid_horizon = grid_horizon;
  c.grid_tolerance = grid_tolerance;
  return c;
}

rl::MixtureEnvConfig PinnSettings::env_config() const {
  rl::MixtureEnvConfig c;
  c.interior = interior;
  c.boundary = boundary;
  c.resample_steps = resample_steps();
  c.cadence = cadence;
  c.lr = lr;
  c.eval_points = eval_points;
  c.spec = nn::MlpSpec::tanh_mlp(2, hidden, 1);
  c.sampler = sampler;
  return c;
}

ExperimentConfig default_config(EnvId env) {
  ExperimentConfig c;
  c.env = env;
  switch (env) {
    case EnvId::kLyapunov:
      c.episodes = 300;
      c.agent.normalize_state = false;
      break;
    case EnvId::kDiffusion:
      break;
    case EnvId::kWave:
      c.pinn.iterations = 1000;
      c.pinn.cadence = 100;
      c.pinn.z_values = {1.0, 2.0};
      c.pinn.z_test = 2.0;
      break;
    case EnvId::kBurgers:
      c.pinn.iterations = 1000;
      c.pinn.cadence = 100;
      c.pinn.z_values = {0.005, 0.01, 0.02, 0.035, 0.05};
      c.pinn.z_test = 0.01 / std::numbers::pi;
      break;
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  const auto& a = c.agent.agent;
  json agent = {{"kind", rl::to_string(c.agent.kind)},
                {"gamma", a.gamma},
                {"buffer", a.buffer},
                {"batch", a.batch},
                {"hidden", a.hidden},
                {"actor_lr", a.actor_lr},
                {"critic_lr", a.critic_lr},
                {"tau", a.tau},
                {"policy_noise", a.policy_noise},
                {"noise_clip", a.noise_clip},
                {"exploration_noise", a.exploration_noise},
                {"policy_delay", a.policy_delay},
                {"initial_temperature", a.initial_temperature},
                {"learn_temperature", a.learn_temperature},
                {"temperature_lr", a.temperature_lr},
                {"target_entropy", std::isnan(a.target_entropy) ? json(nullptr) : json(a.target_entropy)},
                {"updates_per_step", c.agent.updates_per_step},
                {"normalize_state", c.agent.normalize_state}};
  json j = {{"env", to_string(c.env)},
            {"seeds", c.seeds},
            {"episodes", c.episodes},
            {"eval_every_episodes", c.eval_every_episodes},
            {"agent", agent}};
  if (c.env == EnvId::kLyapunov) {
    const auto& l = c.lyapunov;
    const auto& p = l.pendulum;
    j["lyapunov"] = {{"pendulum",
                      {{"mass", p.mass},
                       {"length", p.length},
                       {"gravity", p.gravity},
                       {"friction", p.friction},
                       {"torque_limit", p.torque_limit},
                       {"dt", p.dt}}},
                     {"length_min", l.length_min},
                     {"length_max", l.length_max},
                     {"box_half_width", l.box.half_width},
                     {"feature_hidden", l.feature_hidden},
                     {"feature_out", l.feature_out},
                     {"epsilon", l.epsilon},
                     {"batch", l.batch},
                     {"horizon", l.horizon},
                     {"iterations", l.iterations},
                     {"cadence", l.cadence},
                     {"adam_steps", l.adam_steps},
                     {"lr", l.lr},
                     {"initial_box_fraction", l.initial_box_fraction},
                     {"grid_resolution", l.grid_resolution},
                     {"grid_horizon", l.grid_horizon},
                     {"grid_tolerance", l.grid_tolerance},
                     {"baseline_alphas", l.baseline_alphas}};
  } else {
    const auto& p = c.pinn;
    json ref = reference_json(p.reference);
    ref["hidden"] = hidden_of(p.reference.spec);
    j["pinn"] = {{"interior", p.interior},
                 {"boundary", p.boundary},
                 {"iterations", p.iterations},
                 {"cadence", p.cadence},
                 {"lr", p.lr},
                 {"eval_points", p.eval_points},
                 {"hidden", p.hidden},
                 {"z_min", p.z_min},
                 {"z_max", p.z_max},
                 {"z_values", p.z_values},
                 {"z_test", p.z_test},
                 {"simplex_temperature", p.simplex_temperature},
                 {"sampler",
                  {{"restart_sequences", p.sampler.restart_sequences},
                   {"rad_pool", p.sampler.rad_pool},
                   {"rad_k", p.sampler.rad_k},
                   {"rad_c", p.sampler.rad_c}}},
                 {"reference", ref},
                 {"baseline_selectors", p.baseline_selectors}};
  }
  return j;
}

namespace {

ExperimentConfig parse_complete(const json& j) {
  ExperimentConfig c;
  c.env = env_from_string(j.at("env").get<std::string>());
  c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.episodes = j.at("episodes").get<int>();
  c.eval_every_episodes = j.at("eval_every_episodes").get<int>();
  const json& ag = j.at("agent");
  c.agent.kind = rl::agent_kind_from_string(ag.at("kind").get<std::string>());
  auto& a = c.agent.agent;
  a.gamma = ag.at("gamma").get<double>();
  a.buffer = ag.at("buffer").get<std::size_t>();
  a.batch = ag.at("batch").get<int>();
  a.hidden = ag.at("hidden").get<std::vector<int>>();
  a.actor_lr = ag.at("actor_lr").get<double>();
  a.critic_lr = ag.at("critic_lr").get<double>();
  a.tau = ag.at("tau").get<double>();
  a.policy_noise = ag.at("policy_noise").get<double>();
  a.noise_clip = ag.at("noise_clip").get<double>();
  a.exploration_noise = ag.at("exploration_noise").get<double>();
  a.policy_delay = ag.at("policy_delay").get<int>();
  a.initial_temperature = ag.at("initial_temperature").get<double>();
  a.learn_temperature = ag.at("learn_temperature").get<bool>();
  a.temperature_lr = ag.at("temperature_lr").get<double>();
  // merge_patch drops keys set to null, so absence also means the default.
  a.target_entropy = ag.contains("target_entropy") && !ag.at("target_entropy").is_null()
                         ? ag.at("target_entropy").get<double>()
                         : std::numeric_limits<double>::quiet_NaN();
  c.agent.updates_per_step = ag.at("updates_per_step").get<int>();
  c.agent.normalize_state = ag.at("normalize_state").get<bool>();
  if (c.env == EnvId::kLyapunov) {
    const json& l = j.at("lyapunov");
    auto& s = c.lyapunov;
    const json& p = l.at("pendulum");
    s.pendulum.mass = p.at("mass").get<double>();
    s.pendulum.length = p.at("length").get<double>();
    s.pendulum.gravity = p.at("gravity").get<double>();
    s.pendulum.friction = p.at("friction").get<double>();
    s.pendulum.torque_limit = p.at("torque_limit").get<double>();
    s.pendulum.dt = p.at("dt").get<double>();
    s.length_min = l.at("length_min").get<double>();
    s.length_max = l.at("length_max").get<double>();
    const auto hw = l.at("box_half_width").get<std::vector<double>>();
    if (hw.size() != 2) throw ConfigError("lyapunov.box_half_width: expected 2 entries");
    s.box.half_width = {hw[0], hw[1]};
    s.feature_hidden = l.at("feature_hidden").get<std::vector<int>>();
    s.feature_out = l.at("feature_out").get<int>();
    s.epsilon = l.at("epsilon").get<double>();
    s.batch = l.at("batch").get<int>();
    s.horizon = l.at("horizon").get<int>();
    s.iterations = l.at("iterations").get<int>();
    s.cadence = l.at("cadence").get<int>();
    s.adam_steps = l.at("adam_steps").get<int>();
    s.lr = l.at("lr").get<double>();
    s.initial_box_fraction = l.at("initial_box_fraction").get<double>();
    s.grid_resolution = l.at("grid_resolution").get<int>();
    s.grid_horizon = l.at("grid_horizon").get<int>();
    s.grid_tolerance = l.at("grid_tolerance").get<double>();
    s.baseline_alphas = l.at("baseline_alphas").get<std::vector<double>>();
  } else {
    const json& p = j.at("pinn");
    auto& s = c.pinn;
    s.interior = p.at("interior").get<int>();
    s.boundary = p.at("boundary").get<int>();
    s.iterations = p.at("iterations").get<int>();
    s.cadence = p.at("cadence").get<int>();
    s.lr = p.at("lr").get<double>();
    s.eval_points = p.at("eval_points").get<int>();
    s.hidden = p.at("hidden").get<std::vector<int>>();
    s.z_min = p.at("z_min").get<double>();
    s.z_max = p.at("z_max").get<double>();
    s.z_values = p.at("z_values").get<std::vector<double>>();
    s.z_test = p.at("z_test").get<double>();
    s.simplex_temperature = p.at("simplex_temperature").get<double>();
    const json& sm = p.at("sampler");
    s.sampler.restart_sequences = sm.at("restart_sequences").get<bool>();
    s.sampler.rad_pool = sm.at("rad_pool").get<int>();
    s.sampler.rad_k = sm.at("rad_k").get<double>();
    s.sampler.rad_c = sm.at("rad_c").get<double>();
    const json& r = p.at("reference");
    s.reference.interior = r.at("interior").get<int>();
    s.reference.boundary = r.at("boundary").get<int>();
    s.reference.steps = r.at("steps").get<int>();
    s.reference.batch_interior = r.at("batch_interior").get<int>();
    s.reference.batch_boundary = r.at("batch_boundary").get<int>();
    s.reference.lr = r.at("lr").get<double>();
    s.reference.final_lr = r.at("final_lr").get<double>();
    s.reference.seed = r.at("seed").get<std::uint64_t>();
    s.reference.spec = nn::MlpSpec::tanh_mlp(2, r.at("hidden").get<std::vector<int>>(), 1);
    s.baseline_selectors = p.at("baseline_selectors").get<std::vector<std::string>>();
  }
  return c;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void ExperimentConfig::validate() const {
  require(!seeds.empty(), "seeds: at least one seed is required");
  require(episodes >= 0, "episodes: must be nonnegative");
  require(eval_every_episodes >= 0, "eval_every_episodes: must be nonnegative");
  require(agent.updates_per_step >= 0, "agent.updates_per_step: must be nonnegative");
  for (int h : agent.agent.hidden) require(h > 0, "agent.hidden: widths must be positive");
  agent.agent.validate();
  if (env == EnvId::kLyapunov) {
    const auto& l = lyapunov;
    try {
      l.pendulum.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("lyapunov.pendulum: ") + e.what());
    }
    require(positive_finite(l.length_min) && l.length_min <= l.length_max && std::isfinite(l.length_max),
            "lyapunov.length_min/length_max: need 0 < length_min <= length_max");
    require(positive_finite(l.box.half_width[0]) && positive_finite(l.box.half_width[1]),
            "lyapunov.box_half_width: entries must be positive");
    for (int h : l.feature_hidden) require(h > 0, "lyapunov.feature_hidden: widths must be positive");
    require(l.feature_out > 0, "lyapunov.feature_out: must be positive");
    require(positive_finite(l.epsilon), "lyapunov.epsilon: must be positive");
    require(l.batch > 0 && l.horizon > 0 && l.adam_steps > 0, "lyapunov.batch/horizon/adam_steps: must be positive");
    require(l.cadence > 0 && l.iterations > 0, "lyapunov.iterations/cadence: must be positive");
    require(l.iterations % l.cadence == 0, "lyapunov.cadence: must divide lyapunov.iterations");
    require(positive_finite(l.lr), "lyapunov.lr: must be positive");
    require(l.initial_box_fraction > 0.0 && l.initial_box_fraction <= 1.0,
            "lyapunov.initial_box_fraction: must lie in (0, 1]");
    require(l.grid_resolution >= 2 && l.grid_horizon > 0 && positive_finite(l.grid_tolerance),
            "lyapunov.grid_*: resolution >= 2, positive horizon and tolerance");
    for (double a : l.baseline_alphas) {
      require(a >= kAlphaMin && a <= kAlphaMax,
              "lyapunov.baseline_alphas: " + std::to_string(a) + " outside [1.1, 2.0]");
    }
  } else {
    const auto& p = pinn;
    require(p.interior > 0 && p.boundary > 0, "pinn.interior/boundary: must be positive");
    require(p.cadence > 0 && p.iterations > 0, "pinn.iterations/cadence: must be positive");
    require(p.iterations % p.cadence == 0, "pinn.cadence: must divide pinn.iterations");
    require(positive_finite(p.lr), "pinn.lr: must be positive");
    require(p.eval_points > 0, "pinn.eval_points: must be positive");
    for (int h : p.hidden) require(h > 0, "pinn.hidden: widths must be positive");
    require(positive_finite(p.simplex_temperature), "pinn.simplex_temperature: must be positive");
    require(p.sampler.rad_pool >= p.interior, "pinn.sampler.rad_pool: must be at least pinn.interior");
    require(p.sampler.rad_k >= 0.0 && p.sampler.rad_c >= 0.0, "pinn.sampler.rad_k/rad_c: must be nonnegative");
    require(p.reference.steps > 0 && p.reference.interior > 0 && p.reference.boundary > 0 &&
                p.reference.batch_interior > 0 && p.reference.batch_boundary > 0,
            "pinn.reference: counts must be positive");
    require(positive_finite(p.reference.lr) && positive_finite(p.reference.final_lr),
            "pinn.reference: learning rates must be positive");
    auto check_z = [&](double z, const std::string& key) {
      require(positive_finite(z), key + ": must be positive");
      if (env == EnvId::kWave) require(z == std::round(z), key + ": wave z must be an integer");
    };
    check_z(p.z_test, "pinn.z_test");
    if (p.z_values.empty()) {
      check_z(p.z_min, "pinn.z_min");
      require(std::isfinite(p.z_max) && p.z_min <= p.z_max, "pinn.z_max: must be at least z_min");
      require(env != EnvId::kWave || p.z_min == p.z_max, "pinn.z_values: wave needs a discrete z set");
    }
    for (double z : p.z_values) check_z(z, "pinn.z_values");
    for (const auto& s : p.baseline_selectors) {
      if (s == "mixture") continue;
      try {
        samplers::sampler_from_string(s);
      } catch (const Error&) {
        throw ConfigError("pinn.baseline_selectors: unknown selector '" + s + "'");
      }
    }
  }
}

ExperimentConfig config_from_json(const json& input, const std::vector<std::string>& overrides) {
  json j = input;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& o : overrides) apply_override(j, o);
  if (!j.contains("env") || !j.at("env").is_string()) throw ConfigError("config: \"env\" (string) is required");
  const EnvId env = env_from_string(j.at("env").get<std::string>());
  json merged = to_json(default_config(env));
  check_against(merged, j, "");
  merged.merge_patch(j);
  ExperimentConfig c;
  try {
    c = parse_complete(merged);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, overrides);
}

}  // namespace harvest::harness
