#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "harvest/common/rng.hpp"
#include "harvest/pde/pinn.hpp"
#include "harvest/pde/problem.hpp"

namespace harvest::samplers {

/// Fixed order; defines the layout of per-sampler state and ratio vectors.
enum class SamplerId { kUniformGrid = 0, kRandom, kSobol, kHalton, kRad };
inline constexpr int kSamplerCount = 5;

std::string to_string(SamplerId id);
SamplerId sampler_from_string(const std::string& name);
const std::array<SamplerId, kSamplerCount>& all_samplers();

/// Mixture weights over the five samplers, summing to one.
struct RatioVector {
  std::array<double, kSamplerCount> a{};

  static RatioVector uniform();
  static RatioVector one_hot(SamplerId id);
  /// Throws SamplingError unless entries are nonnegative and sum to 1 within 1e-9.
  void validate() const;
};

/// Absolute PDE residual of the current model at each column of a 2 x N matrix.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

struct SamplerOptions {
  /// Restart Sobol and Halton at index 0 on every call instead of continuing.
  bool restart_sequences = false;
  int rad_pool = 10000;
  double rad_k = 1.0;
  double rad_c = 1.0;
};

/// RAD draw weights res^k / mean(res^k) + c.
Eigen::VectorXd rad_weights(const Eigen::VectorXd& residuals, double k, double c);

/// Cell-centred near-square lattice on the unit square, ceil(sqrt(count)) per
/// axis, row-major with x fastest, truncated to `count`.
Eigen::MatrixXd unit_grid(int count);

/// The five base samplers over one domain, holding the per-run stream state.
class SamplerBank {
 public:
  SamplerBank(const pde::Domain& domain, std::uint64_t seed, SamplerOptions options = {});

  /// `count` interior points from sampler `id`. RAD needs `residual`.
  Eigen::MatrixXd sample(SamplerId id, int count, const ResidualFn& residual = {});

  const SamplerOptions& options() const { return options_; }

 private:
  Eigen::MatrixXd to_domain(Eigen::MatrixXd unit) const;

  pde::Domain domain_;
  SamplerOptions options_;
  Rng random_rng_;
  Rng rad_rng_;
  std::uint64_t sobol_next_ = 0;
  std::uint64_t halton_next_ = 0;
};

struct Mixture {
  Eigen::MatrixXd points;
  std::array<int, kSamplerCount> counts{};
};

/// Largest-remainder split of `count` by `a`, then that many points drawn
/// uniformly without replacement from each pool.
Mixture compose_mixture(const RatioVector& a, std::span<const Eigen::MatrixXd> pools, int count, Rng& rng);

/// Mean squared PDE residual over the columns of `points`.
double residual_summary(pde::PinnEvaluator& eval, const pde::PinnModel& model, const Eigen::MatrixXd& points);

}  // namespace harvest::samplers
