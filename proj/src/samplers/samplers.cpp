#include "harvest/samplers/samplers.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "harvest/common/allocation.hpp"
#include "harvest/common/error.hpp"
#include "harvest/samplers/sequences.hpp"

namespace harvest::samplers {

std::string to_string(SamplerId id) {
  switch (id) {
    case SamplerId::kUniformGrid:
      return "uniform_grid";
    case SamplerId::kRandom:
      return "random";
    case SamplerId::kSobol:
      return "sobol";
    case SamplerId::kHalton:
      return "halton";
    case SamplerId::kRad:
      return "rad";
  }
  return "unknown";
}

SamplerId sampler_from_string(const std::string& name) {
  for (SamplerId id : all_samplers()) {
    if (to_string(id) == name) return id;
  }
  throw ConfigError("unknown sampler '" + name + "'");
}

const std::array<SamplerId, kSamplerCount>& all_samplers() {
  static const std::array<SamplerId, kSamplerCount> ids{SamplerId::kUniformGrid, SamplerId::kRandom,
                                                        SamplerId::kSobol, SamplerId::kHalton,
                                                        SamplerId::kRad};
  return ids;
}

RatioVector RatioVector::uniform() {
  RatioVector r;
  r.a.fill(1.0 / kSamplerCount);
  return r;
}

RatioVector RatioVector::one_hot(SamplerId id) {
  RatioVector r;
  r.a[static_cast<int>(id)] = 1.0;
  return r;
}

void RatioVector::validate() const {
  double sum = 0.0;
  for (double v : a) {
    if (!(v >= 0.0)) throw SamplingError("ratio entries must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw SamplingError("ratio vector does not sum to 1");
}

Eigen::VectorXd rad_weights(const Eigen::VectorXd& residuals, double k, double c) {
  if (residuals.size() == 0) throw SamplingError("RAD needs a nonempty candidate pool");
  const Eigen::ArrayXd powered = residuals.array().abs().pow(k);
  const double mean = powered.mean();
  if (!std::isfinite(mean)) throw SamplingError("RAD residuals are not finite");
  if (mean <= 0.0) return Eigen::VectorXd::Constant(residuals.size(), 1.0);
  return (powered / mean + c).matrix();
}

Eigen::MatrixXd unit_grid(int count) {
  if (count < 1) throw SamplingError("grid needs at least one point");
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  Eigen::MatrixXd pts(2, count);
  for (int n = 0; n < count; ++n) {
    pts(0, n) = (n % side + 0.5) / side;
    pts(1, n) = (n / side + 0.5) / side;
  }
  return pts;
}

SamplerBank::SamplerBank(const pde::Domain& domain, std::uint64_t seed, SamplerOptions options)
    : domain_(domain),
      options_(options),
      random_rng_(make_rng(seed, "samplers.random")),
      rad_rng_(make_rng(seed, "samplers.rad")) {
  if (options_.rad_pool < 1) throw ConfigError("RAD pool must be positive");
}

Eigen::MatrixXd SamplerBank::to_domain(Eigen::MatrixXd unit) const {
  unit.row(0) = (domain_.x_lo + (domain_.x_hi - domain_.x_lo) * unit.row(0).array()).matrix();
  unit.row(1) = (domain_.t_lo + (domain_.t_hi - domain_.t_lo) * unit.row(1).array()).matrix();
  return unit;
}

Eigen::MatrixXd SamplerBank::sample(SamplerId id, int count, const ResidualFn& residual) {
  if (count < 1) throw SamplingError("sample count must be at least 1");
  Eigen::MatrixXd unit(2, count);
  switch (id) {
    case SamplerId::kUniformGrid:
      return to_domain(unit_grid(count));
    case SamplerId::kRandom:
      for (int n = 0; n < count; ++n) {
        unit(0, n) = uniform_open(random_rng_);
        unit(1, n) = uniform_open(random_rng_);
      }
      return to_domain(std::move(unit));
    case SamplerId::kSobol:
      if (options_.restart_sequences) sobol_next_ = 0;
      for (int n = 0; n < count; ++n) {
        const auto p = sobol_point(sobol_next_++);
        unit.col(n) << p[0], p[1];
      }
      return to_domain(std::move(unit));
    case SamplerId::kHalton:
      if (options_.restart_sequences) halton_next_ = 0;
      for (int n = 0; n < count; ++n) {
        const auto p = halton_point(halton_next_++);
        unit.col(n) << p[0], p[1];
      }
      return to_domain(std::move(unit));
    case SamplerId::kRad: {
      if (!residual) throw SamplingError("RAD sampling needs the current model's residual");
      Eigen::MatrixXd pool(2, options_.rad_pool);
      for (int n = 0; n < options_.rad_pool; ++n) {
        pool(0, n) = uniform_open(rad_rng_);
        pool(1, n) = uniform_open(rad_rng_);
      }
      pool = to_domain(std::move(pool));
      const Eigen::VectorXd res = residual(pool);
      if (res.size() != pool.cols()) throw DimensionError("residual function returned the wrong length");
      const Eigen::VectorXd w = rad_weights(res, options_.rad_k, options_.rad_c);
      std::discrete_distribution<int> pick(w.data(), w.data() + w.size());
      Eigen::MatrixXd out(2, count);
      for (int n = 0; n < count; ++n) out.col(n) = pool.col(pick(rad_rng_));
      return out;
    }
  }
  throw SamplingError("unknown sampler");
}

Mixture compose_mixture(const RatioVector& a, std::span<const Eigen::MatrixXd> pools, int count, Rng& rng) {
  a.validate();
  if (pools.size() != kSamplerCount) throw DimensionError("compose_mixture needs one pool per sampler");
  if (count < 1) throw SamplingError("mixture count must be at least 1");
  const auto counts = largest_remainder(a.a, count);
  Mixture m;
  m.points.resize(2, count);
  int col = 0;
  for (int j = 0; j < kSamplerCount; ++j) {
    m.counts[j] = counts[j];
    const int available = static_cast<int>(pools[j].cols());
    if (counts[j] > available) {
      throw SamplingError("sampler " + to_string(all_samplers()[j]) + " has " + std::to_string(available) +
                          " points, mixture needs " + std::to_string(counts[j]));
    }
    if (counts[j] == 0) continue;
    // Partial Fisher-Yates over the pool indices.
    std::vector<int> idx(available);
    std::iota(idx.begin(), idx.end(), 0);
    for (int k = 0; k < counts[j]; ++k) {
      std::uniform_int_distribution<int> pick(k, available - 1);
      std::swap(idx[k], idx[pick(rng)]);
      m.points.col(col++) = pools[j].col(idx[k]);
    }
  }
  return m;
}

double residual_summary(pde::PinnEvaluator& eval, const pde::PinnModel& model, const Eigen::MatrixXd& points) {
  if (points.cols() == 0) throw SamplingError("residual summary needs at least one point");
  return eval.residuals(model, points).squaredNorm() / static_cast<double>(points.cols());
}

}  // namespace harvest::samplers
