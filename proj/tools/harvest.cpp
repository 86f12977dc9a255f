#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "harvest/common/error.hpp"
#include "harvest/common/format.hpp"
#include "harvest/harness/config.hpp"
#include "harvest/harness/experiment.hpp"
#include "harvest/harness/metrics.hpp"
#include "harvest/harness/sanity.hpp"
#include "harvest/nn/checkpoint.hpp"
#include "harvest/pde/pinn.hpp"
#include "harvest/pde/reference.hpp"

namespace fs = std::filesystem;
using namespace harvest;
using nlohmann::json;

namespace {

struct Options {
  std::string config;
  std::string env;
  std::vector<std::string> overrides;
  std::string out;
  std::string checkpoint;
  std::string selector;
  std::vector<double> alphas;
  std::vector<double> zs;
  std::vector<std::uint64_t> seeds;
};

void log_line(const std::string& s) { std::cerr << s << std::endl; }

harness::ExperimentConfig resolve_config(const Options& o, std::vector<std::string> extra = {}) {
  json j = json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot read config " + o.config);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("cannot parse config " + o.config + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config " + o.config + " is not a JSON object");
  }
  if (!o.env.empty()) j["env"] = o.env;
  if (!j.contains("env")) throw ConfigError("no env given (--config with \"env\", or --env)");
  std::vector<std::string> all = o.overrides;
  all.insert(all.end(), extra.begin(), extra.end());
  auto c = harness::config_from_json(j, all);
  if (!o.seeds.empty()) {
    c.seeds = o.seeds;
    c.validate();
  }
  return c;
}

fs::path cache_dir(const fs::path& out) { return pde::cache_dir_from_env(out / "cache"); }

json summary_json(const std::vector<harness::MethodSummary>& methods) {
  json s = json::object();
  for (const auto& m : methods) {
    json d;
    d["final_metric"] = m.final_metric;
    d["median_final_metric"] = harness::median(m.final_metric);
    d["mean_final_metric"] = harness::mean(m.final_metric);
    bool any_nan = false;
    for (double v : m.late_safe_ratio) any_nan = any_nan || std::isnan(v);
    if (!any_nan) d["late_safe_ratio"] = m.late_safe_ratio;
    s[m.run_id] = d;
  }
  return s;
}

void finish_manifest(const fs::path& out, const std::string& command, const harness::ExperimentConfig& c,
                     const harness::MetricsSink& sink, json extra) {
  json files = json::array();
  for (const auto& f : sink.files()) files.push_back(f.filename().string());
  extra["status"] = "complete";
  extra["metrics_files"] = files;
  extra["seeds"] = c.seeds;
  harness::write_manifest(out, command, harness::to_json(c), extra);
}

int cmd_train(const Options& o) {
  const auto c = resolve_config(o);
  const fs::path out = o.out;
  harness::write_manifest(out, "train-rl", harness::to_json(c), {{"status", "running"}, {"seeds", c.seeds}});
  harness::Resources res(c, cache_dir(out), log_line);
  harness::MetricsSink sink(out);
  const auto result = harness::train_agent(c, res, &sink, log_line);
  rl::save_policy(out / "policy.json", result.checkpoint);
  sink.flush();
  finish_manifest(out, "train-rl", c, sink, {{"checkpoint", "policy.json"}});
  log_line("wrote " + (out / "policy.json").string());
  return 0;
}

int cmd_eval(const Options& o) {
  const auto c = resolve_config(o);
  rl::Policy policy(rl::load_policy(o.checkpoint));
  const fs::path out = o.out;
  harness::write_manifest(out, "eval", harness::to_json(c),
                          {{"status", "running"}, {"seeds", c.seeds}, {"checkpoint", o.checkpoint}});
  harness::Resources res(c, cache_dir(out), log_line);
  harness::MetricsSink sink(out);
  const auto summary = harness::evaluate_policy(c, res, policy, &sink, log_line);
  sink.flush();
  finish_manifest(out, "eval", c, sink, {{"checkpoint", o.checkpoint}, {"summary", summary_json({summary})}});
  return 0;
}

int cmd_baseline(const Options& o) {
  std::vector<std::string> extra;
  if (!o.selector.empty()) extra.push_back("pinn.baseline_selectors=[\"" + o.selector + "\"]");
  if (!o.alphas.empty()) {
    std::string list = "lyapunov.baseline_alphas=[";
    for (std::size_t i = 0; i < o.alphas.size(); ++i) list += (i ? "," : "") + format_double(o.alphas[i]);
    extra.push_back(list + "]");
  }
  const auto c = resolve_config(o, extra);
  const fs::path out = o.out;
  harness::write_manifest(out, "baseline", harness::to_json(c), {{"status", "running"}, {"seeds", c.seeds}});
  harness::Resources res(c, cache_dir(out), log_line);
  harness::MetricsSink sink(out);
  const auto summaries = harness::run_baselines(c, res, &sink, log_line);
  sink.flush();
  finish_manifest(out, "baseline", c, sink, {{"summary", summary_json(summaries)}});
  return 0;
}

int cmd_reference(const Options& o) {
  const auto c = resolve_config(o);
  if (!harness::is_pinn(c.env)) throw ConfigError("reference needs a PDE env (diffusion, wave, burgers)");
  const fs::path out = o.out;
  std::vector<double> zs = o.zs;
  if (zs.empty()) {
    zs = c.pinn.z_values;
    zs.push_back(c.pinn.z_test);
  }
  harness::write_manifest(out, "reference", harness::to_json(c), {{"status", "running"}, {"z", zs}});
  const fs::path cache = cache_dir(out);
  harness::MetricsSink sink(out);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const pde::PdeProblem problem = pde::make_problem(harness::to_string(c.env), zs[i]);
    const auto& budget = c.pinn.reference;
    const int every = std::max(1, budget.steps / 10);
    log_line("reference " + problem.name + " z=" + format_double(zs[i]));
    const auto r = pde::load_or_train_reference(problem, budget, cache, [every](int step, double loss) {
      if (step % every == 0) log_line("  step " + std::to_string(step) + " loss " + format_double(loss));
    });
    const auto seed = budget.seed;
    sink.write({"reference", seed, static_cast<int>(i), -1, budget.steps, "z", zs[i]});
    sink.write({"reference", seed, static_cast<int>(i), -1, budget.steps, "train_residual_rms", r.train_residual_rms});
    if (problem.has_exact()) {
      Rng rng = make_rng(seed, "reference.check");
      const Eigen::MatrixXd pts = pde::uniform_interior(problem.domain, 10000, rng);
      const double err = pde::solution_error(problem, r.model, pts);
      sink.write({"reference", seed, static_cast<int>(i), -1, budget.steps, "exact_error", err});
      log_line("  relative L2 error against the closed form " + format_double(err));
    }
    log_line("  cached at " + pde::reference_cache_path(cache, problem, budget).string());
  }
  sink.flush();
  finish_manifest(out, "reference", c, sink, {{"z", zs}});
  return 0;
}

int cmd_sanity(std::uint64_t seed) {
  const auto results = harness::run_sanity(seed, log_line);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  if (failed > 0) {
    std::cerr << "error: sanity: " << failed << " of " << results.size() << " checks failed" << std::endl;
    return 1;
  }
  return 0;
}

void add_config_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--env", o.env, "lyapunov, diffusion, wave or burgers (overrides the file)");
  sub->add_option("--set", o.overrides, "Override, dotted.key=value; repeatable")->take_all();
  sub->add_option("--seed", o.seeds, "Seed list replacing config seeds")->take_all();
  sub->add_option("--out", o.out, "Output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive collocation harvesting with RL-chosen sampling"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t sanity_seed = 0;

  auto* train = app.add_subcommand("train-rl", "Train an RL agent; writes policy.json and train.csv");
  add_config_options(train, o);
  auto* eval = app.add_subcommand("eval", "Evaluate a policy on the test parameter over the config seeds");
  add_config_options(eval, o);
  eval->add_option("--checkpoint", o.checkpoint, "Policy checkpoint (policy.json)")->required();
  auto* base = app.add_subcommand("baseline", "Fixed-alpha sweep or sampler baselines on the test parameter");
  add_config_options(base, o);
  base->add_option("--selector", o.selector, "Single PINN selector: uniform_grid, random, sobol, halton, rad, mixture");
  base->add_option("--alpha", o.alphas, "Fixed alpha values replacing the sweep")->take_all();
  auto* ref = app.add_subcommand("reference", "Train and cache reference networks");
  add_config_options(ref, o);
  ref->add_option("--z", o.zs, "PDE parameters (default: z_values and z_test)")->take_all();
  auto* sanity = app.add_subcommand("sanity", "Gradient, sequence and bandit self-checks");
  sanity->add_option("--seed", sanity_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << std::endl;
    std::cerr << app.help() << std::endl;
    return 2;
  }

  try {
    if (*train) return cmd_train(o);
    if (*eval) return cmd_eval(o);
    if (*base) return cmd_baseline(o);
    if (*ref) return cmd_reference(o);
    if (*sanity) return cmd_sanity(sanity_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << std::endl;
    return 2;
  } catch (const CheckpointError& e) {
    std::cerr << "error: checkpoint: " << e.what() << std::endl;
    return 1;
  } catch (const DivergenceError& e) {
    std::cerr << "error: divergence: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << std::endl;
    return 1;
  }
  return 2;
}
