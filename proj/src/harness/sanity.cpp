#include "harvest/harness/sanity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "harvest/common/format.hpp"
#include "harvest/pde/collocation.hpp"
#include "harvest/rl/replay.hpp"
#include "harvest/samplers/sequences.hpp"

namespace harvest::harness {

namespace {

SanityResult gradient_check(std::uint64_t seed) {
  Rng rng = make_rng(seed, "sanity.fd");
  double worst = 0.0;
  const int nets = 20;
  const int coords = 10;
  for (int n = 0; n < nets; ++n) {
    const pde::PdeProblem problem = pde::make_diffusion(1.0 + n % 2);
    const nn::MlpSpec spec = nn::MlpSpec::tanh_mlp(2, {8, 8}, 1);
    pde::PinnModel model = pde::make_pinn_model(problem, rng(), spec);
    pde::CollocationSet colloc;
    colloc.interior = pde::uniform_interior(problem.domain, 8, rng);
    colloc.boundary = pde::sample_boundary(problem, 4, rng);
    pde::PinnEvaluator eval(problem, spec);
    std::vector<double> grad(model.params.size(), 0.0);
    eval.loss(model, colloc, grad);
    std::uniform_int_distribution<std::size_t> pick(0, model.params.size() - 1);
    for (int c = 0; c < coords; ++c) {
      const std::size_t i = pick(rng);
      const double h = 1e-6;
      const double keep = model.params[i];
      model.params[i] = keep + h;
      const double up = eval.loss(model, colloc);
      model.params[i] = keep - h;
      const double down = eval.loss(model, colloc);
      model.params[i] = keep;
      const double fd = (up - down) / (2.0 * h);
      worst = std::max(worst, std::abs(grad[i] - fd) / std::max(std::abs(fd), 1e-3));
    }
  }
  return {"autodiff.finite_difference", worst < 1e-4,
          std::to_string(nets) + " nets x " + std::to_string(coords) + " coords, max rel err " + format_double(worst)};
}

// Radical inverse by integer digit reversal, divided once.
double radical_inverse_oracle(std::uint64_t base, std::uint64_t i) {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  for (; i > 0; i /= base) {
    num = num * base + i % base;
    den *= base;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

SanityResult halton_check() {
  int bad = 0;
  for (std::uint64_t i = 0; i < 64; ++i) {
    const auto p = samplers::halton_point(i);
    if (p[0] != radical_inverse_oracle(2, i + 1) || p[1] != radical_inverse_oracle(3, i + 1)) ++bad;
  }
  return {"sequences.halton", bad == 0, std::to_string(64 - bad) + "/64 points exact"};
}

// Bratley-Fox direction numbers for x^2 + x + 1, Antonov-Saleev gray-code update.
SanityResult sobol_check() {
  std::uint32_t v1[32];
  std::uint32_t v2[32];
  std::uint32_t m = 1;
  for (int k = 1; k <= 32; ++k) {
    if (k > 1) m = (2 * m) ^ m;
    v1[k - 1] = 1u << (32 - k);
    v2[k - 1] = m << (32 - k);
  }
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  int bad = 0;
  for (std::uint64_t n = 0; n < 64; ++n) {
    int c = 0;
    for (std::uint64_t v = n; v & 1; v >>= 1) ++c;
    x ^= v1[c];
    y ^= v2[c];
    const auto p = samplers::sobol_point(n);
    if (p[0] != std::ldexp(static_cast<double>(x), -32) || p[1] != std::ldexp(static_cast<double>(y), -32)) ++bad;
  }
  return {"sequences.sobol", bad == 0, std::to_string(64 - bad) + "/64 points exact"};
}

SanityResult bandit_check(std::uint64_t seed) {
  const double target = 0.37;
  rl::Td3Agent agent(1, 1, rl::AgentConfig{}, substream_seed(seed, "sanity.agent"));
  rl::ReplayBuffer buffer(100000, 1, 1);
  Rng rng = make_rng(seed, "sanity.bandit");
  const Eigen::VectorXd s = Eigen::VectorXd::Zero(1);
  int updates = 0;
  while (updates < 5000) {
    const Eigen::VectorXd a = agent.act(s, true, rng);
    buffer.push({s, a, -(a[0] - target) * (a[0] - target), s, true});
    if (agent.update(buffer, rng).ready) ++updates;
  }
  const double a = agent.act(s, false, rng)[0];
  return {"rl.td3_bandit", std::abs(a - target) < 0.05,
          "action " + format_double(a) + ", optimum " + format_double(target)};
}

}  // namespace

std::vector<SanityResult> run_sanity(std::uint64_t seed, const Log& log) {
  std::vector<SanityResult> out;
  auto record = [&](SanityResult r) {
    if (log) log(std::string(r.passed ? "PASS " : "FAIL ") + r.name + ": " + r.detail);
    out.push_back(std::move(r));
  };
  record(gradient_check(seed));
  record(halton_check());
  record(sobol_check());
  record(bandit_check(seed));
  return out;
}

}  // namespace harvest::harness
