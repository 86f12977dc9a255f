#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "harvest/common/allocation.hpp"
#include "harvest/samplers/samplers.hpp"
#include "harvest/samplers/sequences.hpp"
#include "support/oracles.hpp"

using namespace harvest;
using namespace harvest::samplers;
using harvest::testing::Rational;
using harvest::testing::radical_inverse_oracle;
using harvest::testing::sobol_oracle;

namespace {

const pde::Domain kUnit{0.0, 1.0, 0.0, 1.0};

int bin16(double x, double t, const pde::Domain& d) {
  const int bx = std::min(3, static_cast<int>(4.0 * (x - d.x_lo) / (d.x_hi - d.x_lo)));
  const int bt = std::min(3, static_cast<int>(4.0 * (t - d.t_lo) / (d.t_hi - d.t_lo)));
  return bt * 4 + bx;
}

}  // namespace

TEST_CASE("Halton base-2 coordinates start 1/2, 1/4, 3/4, 1/8") {
  const double expect[] = {0.5, 0.25, 0.75, 0.125};
  for (int i = 0; i < 4; ++i) CHECK(halton_point(i)[0] == expect[i]);
  CHECK(halton_point(0)[1] == 1.0 / 3.0);
  CHECK(halton_point(1)[1] == 2.0 / 3.0);
  CHECK(halton_point(2)[1] == 1.0 / 9.0);
}

TEST_CASE("Halton matches an exact rational radical inverse") {
  for (std::uint64_t i = 0; i < 4096; ++i) {
    const auto p = halton_point(i);
    const Rational r2 = radical_inverse_oracle(2, i + 1);
    const Rational r3 = radical_inverse_oracle(3, i + 1);
    CHECK(p[0] == static_cast<double>(r2.num) / static_cast<double>(r2.den));
    CHECK(p[1] == static_cast<double>(r3.num) / static_cast<double>(r3.den));
  }
}

TEST_CASE("Sobol first coordinate starts 1/2, 3/4, 1/4") {
  CHECK(sobol_point(0)[0] == 0.5);
  CHECK(sobol_point(1)[0] == 0.75);
  CHECK(sobol_point(2)[0] == 0.25);
}

TEST_CASE("Sobol matches the direction-number oracle") {
  const auto oracle = sobol_oracle(5000);
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    const auto p = sobol_point(i);
    CHECK(p[0] == oracle[i][0]);
    CHECK(p[1] == oracle[i][1]);
  }
}

TEST_CASE("sequence streams continue across calls or restart on request") {
  const pde::Domain d{-0.5, 0.5, 0.0, 1.0};
  SamplerBank cont(d, 1);
  const auto a = cont.sample(SamplerId::kSobol, 10);
  const auto b = cont.sample(SamplerId::kSobol, 10);
  for (int n = 0; n < 10; ++n) {
    const auto p = sobol_point(10 + n);
    CHECK(b(0, n) == -0.5 + p[0]);
    CHECK(b(1, n) == p[1]);
  }
  SamplerBank restart(d, 1, {.restart_sequences = true});
  restart.sample(SamplerId::kHalton, 7);
  const auto h = restart.sample(SamplerId::kHalton, 7);
  CHECK(h(0, 0) == -0.5 + halton_point(0)[0]);
  CHECK(a(0, 0) == -0.5 + sobol_point(0)[0]);
}

TEST_CASE("uniform grid is a truncated cell-centred lattice") {
  const auto g = unit_grid(50);
  REQUIRE(g.cols() == 50);
  CHECK(g(0, 0) == 0.5 / 8);
  CHECK(g(1, 0) == 0.5 / 8);
  CHECK(g(0, 7) == 7.5 / 8);
  CHECK(g(0, 8) == 0.5 / 8);
  CHECK(g(1, 8) == 1.5 / 8);
  CHECK(g(1, 49) == 6.5 / 8);
  const auto sq = unit_grid(49);
  CHECK(sq(0, 48) == 6.5 / 7);
  CHECK(sq(1, 48) == 6.5 / 7);
}

TEST_CASE("every sampler stays strictly inside the domain") {
  const auto p = pde::make_diffusion(2.0);
  SamplerBank bank(p.domain, 3);
  const ResidualFn res = [](const Eigen::MatrixXd& x) -> Eigen::VectorXd {
    return (x.row(0).array() * 10).sin().abs().matrix().transpose();
  };
  for (SamplerId id : all_samplers()) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto pts = bank.sample(id, 333, res);
      REQUIRE(pts.cols() == 333);
      for (int n = 0; n < pts.cols(); ++n) CHECK(p.domain.strictly_inside({pts(0, n), pts(1, n)}));
    }
  }
  CHECK_THROWS_AS(bank.sample(SamplerId::kRad, 10), SamplingError);
  CHECK_THROWS_AS(bank.sample(SamplerId::kRandom, 0), SamplingError);
}

TEST_CASE("random and RAD draws are reproducible per seed") {
  const ResidualFn res = [](const Eigen::MatrixXd& x) -> Eigen::VectorXd {
    return x.row(1).transpose();
  };
  SamplerBank a(kUnit, 5);
  SamplerBank b(kUnit, 5);
  CHECK(a.sample(SamplerId::kRandom, 20) == b.sample(SamplerId::kRandom, 20));
  CHECK(a.sample(SamplerId::kRad, 20, res) == b.sample(SamplerId::kRad, 20, res));
  SamplerBank c(kUnit, 6);
  CHECK(a.sample(SamplerId::kRandom, 20) != c.sample(SamplerId::kRandom, 20));
}

TEST_CASE("RAD with constant residual is uniform (chi-square, 16 bins)") {
  const ResidualFn flat = [](const Eigen::MatrixXd& x) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(x.cols(), 0.3);
  };
  SamplerBank bank(kUnit, 11);
  std::array<double, 16> counts{};
  const int calls = 1000;
  const int per_call = 100;
  for (int c = 0; c < calls; ++c) {
    const auto pts = bank.sample(SamplerId::kRad, per_call, flat);
    for (int n = 0; n < per_call; ++n) counts[bin16(pts(0, n), pts(1, n), kUnit)] += 1.0;
  }
  const double expect = calls * per_call / 16.0;
  double stat = 0.0;
  for (double c : counts) stat += (c - expect) * (c - expect) / expect;
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(15), stat));
  CHECK(p > 0.01);
}

TEST_CASE("RAD frequencies match the target density in total variation") {
  const pde::Domain d{-1.0, 1.0, 0.0, 1.0};
  auto r = [](double x, double t) { return std::abs(std::sin(std::numbers::pi * x)) * (0.2 + t); };
  const ResidualFn res = [&](const Eigen::MatrixXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd v(x.cols());
    for (int n = 0; n < x.cols(); ++n) v[n] = r(x(0, n), x(1, n));
    return v;
  };
  // Target density (r / E[r] + 1) / (2 |domain|), bin masses by midpoint quadrature.
  const int q = 400;
  std::array<double, 16> target{};
  double mean_r = 0.0;
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const double x = d.x_lo + (i + 0.5) / q * 2.0;
      const double t = (j + 0.5) / q;
      mean_r += r(x, t);
    }
  }
  mean_r /= q * q;
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      const double x = d.x_lo + (i + 0.5) / q * 2.0;
      const double t = (j + 0.5) / q;
      target[bin16(x, t, d)] += (r(x, t) / mean_r + 1.0) / 2.0 / (q * q);
    }
  }
  SamplerBank bank(d, 13);
  std::array<double, 16> emp{};
  const int calls = 100;
  const int per_call = 1000;
  for (int c = 0; c < calls; ++c) {
    const auto pts = bank.sample(SamplerId::kRad, per_call, res);
    for (int n = 0; n < per_call; ++n) emp[bin16(pts(0, n), pts(1, n), d)] += 1.0 / (calls * per_call);
  }
  double tv = 0.0;
  for (int b = 0; b < 16; ++b) tv += 0.5 * std::abs(emp[b] - target[b]);
  CHECK(tv < 0.02);
}

TEST_CASE("rad weights follow res^k / mean + c") {
  const Eigen::VectorXd res = (Eigen::VectorXd(4) << 1.0, -3.0, 0.0, 4.0).finished();
  const Eigen::VectorXd w = rad_weights(res, 1.0, 1.0);
  CHECK(w[0] == doctest::Approx(1.0 / 2.0 + 1.0));
  CHECK(w[1] == doctest::Approx(3.0 / 2.0 + 1.0));
  CHECK(w[2] == doctest::Approx(1.0));
  CHECK(w[3] == doctest::Approx(3.0));
  const Eigen::VectorXd w2 = rad_weights(res, 2.0, 0.0);
  CHECK(w2[3] == doctest::Approx(16.0 / 6.5));
}

TEST_CASE("largest remainder examples and tie-breaking") {
  const std::vector<double> a{0.5, 0.2, 0.1, 0.1, 0.1};
  CHECK(largest_remainder(a, 50) == std::vector<int>{25, 10, 5, 5, 5});
  const std::vector<double> even(5, 0.2);
  CHECK(largest_remainder(even, 50) == std::vector<int>(5, 10));
  const std::vector<double> three(3, 1.0);
  CHECK(largest_remainder(three, 2) == std::vector<int>{1, 1, 0});
  CHECK(largest_remainder(three, 50) == std::vector<int>{17, 17, 16});
  const std::vector<double> zero(3, 0.0);
  CHECK_THROWS(largest_remainder(zero, 5));
}

TEST_CASE("compose_mixture counts and membership") {
  std::vector<Eigen::MatrixXd> pools;
  for (int j = 0; j < kSamplerCount; ++j) {
    Eigen::MatrixXd m(2, 60);
    for (int n = 0; n < 60; ++n) m.col(n) << j, n;
    pools.push_back(m);
  }
  Rng rng = make_rng(0, "mix");
  const auto sobol = compose_mixture(RatioVector::one_hot(SamplerId::kSobol), pools, 50, rng);
  CHECK(sobol.points.cols() == 50);
  for (int n = 0; n < 50; ++n) CHECK(sobol.points(0, n) == static_cast<double>(SamplerId::kSobol));
  std::set<double> seen;
  for (int n = 0; n < 50; ++n) seen.insert(sobol.points(1, n));
  CHECK(seen.size() == 50);

  const auto uni = compose_mixture(RatioVector::uniform(), pools, 50, rng);
  for (int c : uni.counts) CHECK(c == 10);

  RatioVector skew{{0.5, 0.2, 0.1, 0.1, 0.1}};
  CHECK(compose_mixture(skew, pools, 50, rng).counts == std::array<int, 5>{25, 10, 5, 5, 5});

  std::vector<Eigen::MatrixXd> small = pools;
  small[0] = pools[0].leftCols(3);
  CHECK_THROWS_AS(compose_mixture(RatioVector::uniform(), small, 50, rng), SamplingError);
  RatioVector bad{{0.5, 0.5, 0.5, 0.0, 0.0}};
  CHECK_THROWS_AS(compose_mixture(bad, pools, 50, rng), SamplingError);
}

TEST_CASE("compose_mixture counts track a * count within one") {
  std::vector<Eigen::MatrixXd> pools(kSamplerCount, Eigen::MatrixXd::Zero(2, 200));
  std::mt19937_64 g(4);
  std::gamma_distribution<double> gamma(0.5, 1.0);
  Rng rng = make_rng(1, "mix");
  for (int trial = 0; trial < 500; ++trial) {
    RatioVector r;
    double sum = 0.0;
    for (double& v : r.a) sum += (v = gamma(g));
    for (double& v : r.a) v /= sum;
    const int count = 1 + trial % 150;
    const auto m = compose_mixture(r, pools, count, rng);
    int total = 0;
    for (int j = 0; j < kSamplerCount; ++j) {
      total += m.counts[j];
      CHECK(std::abs(m.counts[j] - r.a[j] * count) < 1.0);
    }
    CHECK(total == count);
  }
}

TEST_CASE("residual summary: mean invariance and a hand-computed linear case") {
  const auto p = pde::make_diffusion(1.0);
  auto model = pde::make_pinn_model(p, 0, nn::MlpSpec{{2, 1}, {nn::Activation::kLinear}});
  // u = w_x x' + w_t t' + b with t' = (t - 0.5) / 0.5, so u_t = 2 w_t and u_xx = 0.
  model.params = {0.3, -0.7, 0.1};
  pde::PinnEvaluator eval(p, model.spec);
  const double x = 0.25;
  const double t = 0.6;
  const double pi = std::numbers::pi;
  const double r = 2 * -0.7 - (pi * pi - 1) * std::exp(-t) * std::sin(pi * x);
  const Eigen::MatrixXd one = (Eigen::MatrixXd(2, 1) << x, t).finished();
  CHECK(residual_summary(eval, model, one) == doctest::Approx(r * r).epsilon(1e-13));

  Rng rng = make_rng(2, "dup");
  const auto pts = pde::uniform_interior(p.domain, 40, rng);
  Eigen::MatrixXd twice(2, 80);
  twice << pts, pts;
  CHECK(residual_summary(eval, model, twice) == doctest::Approx(residual_summary(eval, model, pts)).epsilon(1e-14));
}

TEST_CASE("Sobol beats pseudo-random on a box-discrepancy proxy") {
  const int n = 256;
  Eigen::MatrixXd sobol(2, n);
  for (int i = 0; i < n; ++i) {
    const auto p = sobol_point(i);
    sobol.col(i) << p[0], p[1];
  }
  auto proxy = [n](const Eigen::MatrixXd& pts, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int b = 0; b < 100; ++b) {
      const double ax = u(rng);
      const double at = u(rng);
      int inside = 0;
      for (int i = 0; i < n; ++i) inside += pts(0, i) < ax && pts(1, i) < at;
      worst = std::max(worst, std::abs(static_cast<double>(inside) / n - ax * at));
    }
    return worst;
  };
  std::vector<double> s_stats;
  std::vector<double> r_stats;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 boxes(seed);
    std::mt19937_64 boxes_copy(seed);
    SamplerBank bank(kUnit, seed);
    s_stats.push_back(proxy(sobol, boxes));
    r_stats.push_back(proxy(bank.sample(SamplerId::kRandom, n), boxes_copy));
  }
  std::nth_element(s_stats.begin(), s_stats.begin() + 10, s_stats.end());
  std::nth_element(r_stats.begin(), r_stats.begin() + 10, r_stats.end());
  CHECK(s_stats[10] < r_stats[10]);
}
