#include "harvest/pde/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "harvest/common/allocation.hpp"
#include "harvest/common/error.hpp"
#include "harvest/common/format.hpp"
#include "harvest/nn/adam.hpp"
#include "harvest/nn/checkpoint.hpp"

namespace harvest::pde {

namespace {

constexpr int kReferenceVersion = 1;

// Cycles through a shuffled index list, reshuffling at the end of each pass.
class EpochIndex {
 public:
  explicit EpochIndex(int n) : order_(static_cast<std::size_t>(n)) {
    std::iota(order_.begin(), order_.end(), 0);
    pos_ = order_.size();
  }

  int next(Rng& rng) {
    if (pos_ == order_.size()) {
      std::shuffle(order_.begin(), order_.end(), rng);
      pos_ = 0;
    }
    return order_[pos_++];
  }

 private:
  std::vector<int> order_;
  std::size_t pos_ = 0;
};

void check_budget(const ReferenceBudget& b) {
  if (b.interior < 1 || b.steps < 0 || b.batch_interior < 1 || b.boundary < 0 || b.batch_boundary < 0) {
    throw ConfigError("reference budget: counts must be positive");
  }
  if (b.batch_interior > b.interior || b.batch_boundary > b.boundary) {
    throw ConfigError("reference budget: batch larger than the dense set");
  }
  if (!(b.lr > 0.0) || !(b.final_lr > 0.0)) throw ConfigError("reference budget: learning rates must be positive");
}

std::string budget_summary(const PdeProblem& problem, const ReferenceBudget& b) {
  return "problem=" + problem.name + " z=" + format_double(problem.z) + " seed=" + std::to_string(b.seed) +
         " steps=" + std::to_string(b.steps) + " interior=" + std::to_string(b.interior) +
         " boundary=" + std::to_string(b.boundary) + " batch=" + std::to_string(b.batch_interior) + "/" +
         std::to_string(b.batch_boundary) + " lr=" + format_double(b.lr);
}

}  // namespace

ReferenceResult train_reference(const PdeProblem& problem, const ReferenceBudget& budget,
                                const ReferenceProgress& progress) {
  check_budget(budget);
  Rng point_rng = make_rng(budget.seed, "pde.reference.points");
  const Eigen::MatrixXd dense = uniform_interior(problem.domain, budget.interior, point_rng);
  const auto dense_boundary = sample_boundary(problem, budget.boundary, point_rng);

  const std::size_t pieces = problem.boundary.size();
  std::vector<int> batch_counts(pieces, 0);
  if (pieces > 0) {
    std::vector<double> sizes(pieces);
    for (std::size_t k = 0; k < pieces; ++k) sizes[k] = static_cast<double>(dense_boundary[k].cols());
    batch_counts = largest_remainder(sizes, budget.batch_boundary);
  }

  PinnModel model = make_pinn_model(problem, budget.seed, budget.spec);
  PinnEvaluator eval(problem, model.spec);
  nn::AdamState adam(model.params.size(), {.lr = budget.lr});
  std::vector<double> grad(model.params.size());

  Rng batch_rng = make_rng(budget.seed, "pde.reference.batch");
  EpochIndex interior_index(budget.interior);
  std::vector<EpochIndex> boundary_index;
  for (std::size_t k = 0; k < pieces; ++k) boundary_index.emplace_back(static_cast<int>(dense_boundary[k].cols()));

  CollocationSet batch;
  batch.interior.resize(2, budget.batch_interior);
  batch.boundary.resize(pieces);
  for (std::size_t k = 0; k < pieces; ++k) batch.boundary[k].resize(2, batch_counts[k]);

  const double decay = budget.steps > 0 ? std::log(budget.final_lr / budget.lr) / budget.steps : 0.0;
  for (int step = 0; step < budget.steps; ++step) {
    for (int n = 0; n < budget.batch_interior; ++n) batch.interior.col(n) = dense.col(interior_index.next(batch_rng));
    for (std::size_t k = 0; k < pieces; ++k) {
      for (int n = 0; n < batch_counts[k]; ++n) {
        batch.boundary[k].col(n) = dense_boundary[k].col(boundary_index[k].next(batch_rng));
      }
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const double loss = eval.loss(model, batch, grad);
    if (!std::isfinite(loss)) {
      throw DivergenceError("reference training diverged at step " + std::to_string(step) + " (" +
                            budget_summary(problem, budget) + ")");
    }
    adam.config.lr = budget.lr * std::exp(decay * step);
    try {
      nn::adam_step(model.params, grad, adam);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " (" + budget_summary(problem, budget) + ")");
    }
    if (progress && (step % 1000 == 0 || step + 1 == budget.steps)) progress(step, loss);
  }

  ReferenceResult result{std::move(model), 0.0};
  const Eigen::VectorXd r = eval.residuals(result.model, dense);
  result.train_residual_rms = std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
  return result;
}

std::filesystem::path reference_cache_path(const std::filesystem::path& dir, const PdeProblem& problem,
                                           const ReferenceBudget& budget) {
  return dir / (problem.name + "_z" + format_double(problem.z) + "_seed" + std::to_string(budget.seed) +
                "_steps" + std::to_string(budget.steps) + ".json");
}

void save_reference(const std::filesystem::path& path, const PdeProblem& problem,
                    const ReferenceBudget& budget, const ReferenceResult& result) {
  nlohmann::json j{{"format", "harvest.reference"},
                   {"version", kReferenceVersion},
                   {"problem", problem.name},
                   {"z", problem.z},
                   {"seed", budget.seed},
                   {"steps", budget.steps},
                   {"interior", budget.interior},
                   {"boundary", budget.boundary},
                   {"train_residual_rms", result.train_residual_rms},
                   {"input_offset", result.model.map.offset},
                   {"input_scale", result.model.map.scale},
                   {"net", nn::to_json(result.model.spec, result.model.params)}};
  nn::write_json_file(path, j);
}

ReferenceResult load_reference(const std::filesystem::path& path) {
  const nlohmann::json j = nn::read_json_file(path);
  try {
    if (j.at("format").get<std::string>() != "harvest.reference") {
      throw CheckpointError(path.string() + " is not a reference record");
    }
    if (j.at("version").get<int>() != kReferenceVersion) {
      throw CheckpointError(path.string() + ": unsupported reference version");
    }
    const nn::MlpRecord rec = nn::mlp_from_json(j.at("net"));
    ReferenceResult r;
    r.model.spec = rec.spec;
    r.model.params = rec.params;
    r.model.map.offset = j.at("input_offset").get<std::vector<double>>();
    r.model.map.scale = j.at("input_scale").get<std::vector<double>>();
    r.train_residual_rms = j.at("train_residual_rms").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError("malformed reference record " + path.string() + ": " + e.what());
  }
}

ReferenceResult load_or_train_reference(const PdeProblem& problem, const ReferenceBudget& budget,
                                        const std::filesystem::path& cache_dir,
                                        const ReferenceProgress& progress) {
  const auto path = reference_cache_path(cache_dir, problem, budget);
  if (std::filesystem::exists(path)) return load_reference(path);
  ReferenceResult r = train_reference(problem, budget, progress);
  std::filesystem::create_directories(cache_dir);
  save_reference(path, problem, budget, r);
  return r;
}

std::filesystem::path cache_dir_from_env(const std::filesystem::path& fallback) {
  const char* env = std::getenv("HARVEST_CACHE_DIR");
  if (env != nullptr && *env != '\0') return env;
  return fallback;
}

}  // namespace harvest::pde
