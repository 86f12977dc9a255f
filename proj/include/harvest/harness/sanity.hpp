#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "harvest/harness/experiment.hpp"

namespace harvest::harness {

struct SanityResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick installation check: PINN loss gradients against central finite
/// differences, Halton and Sobol prefixes against integer oracles, and a
/// one-step TD3 bandit. Takes about 20 seconds.
std::vector<SanityResult> run_sanity(std::uint64_t seed = 0, const Log& log = {});

}  // namespace harvest::harness
