#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "harvest/pde/pinn.hpp"

namespace harvest::pde {

struct ReferenceBudget {
  int interior = 10000;
  int boundary = 400;
  int steps = 60000;
  int batch_interior = 512;
  int batch_boundary = 128;
  double lr = 1e-3;
  /// Learning rate decays geometrically from lr to final_lr over the run.
  double final_lr = 1e-5;
  std::uint64_t seed = 0;
  nn::MlpSpec spec = default_pinn_spec();
};

struct ReferenceResult {
  PinnModel model;
  /// Residual RMS over the full dense interior set after training.
  double train_residual_rms = 0.0;
};

using ReferenceProgress = std::function<void(int step, double loss)>;

/// Long minibatch Adam run on a dense fixed collocation set. Throws
/// DivergenceError naming the seed and budget on a non-finite loss.
ReferenceResult train_reference(const PdeProblem& problem, const ReferenceBudget& budget,
                                const ReferenceProgress& progress = {});

/// Cache file name keyed by problem name, z, seed and step budget.
std::filesystem::path reference_cache_path(const std::filesystem::path& dir, const PdeProblem& problem,
                                           const ReferenceBudget& budget);

void save_reference(const std::filesystem::path& path, const PdeProblem& problem,
                    const ReferenceBudget& budget, const ReferenceResult& result);
ReferenceResult load_reference(const std::filesystem::path& path);

/// Loads the cached reference if present, otherwise trains and caches it.
ReferenceResult load_or_train_reference(const PdeProblem& problem, const ReferenceBudget& budget,
                                        const std::filesystem::path& cache_dir,
                                        const ReferenceProgress& progress = {});

/// Directory from HARVEST_CACHE_DIR, or `fallback` when unset.
std::filesystem::path cache_dir_from_env(const std::filesystem::path& fallback);

}  // namespace harvest::pde
