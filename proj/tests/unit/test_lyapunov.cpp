#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "harvest/common/error.hpp"
#include "harvest/lyapunov/level_set.hpp"
#include "support/oracles.hpp"

using namespace harvest;
using namespace harvest::lyapunov;
using harvest::testing::policy_iteration_lqr;

namespace {

// v(x) = eps |x|^2: zero feature weights make g constant.
nn::LyapunovNet quadratic_net(double eps, nn::MlpSpec spec = nn::MlpSpec::tanh_mlp(2, {8}, 4)) {
  auto net = nn::LyapunovNet::make(spec, 1, eps);
  std::fill(net.params.begin(), net.params.end(), 0.0);
  return net;
}

// Independent closed-loop integrator written straight from the equations of motion.
State oracle_simulate(const PendulumParams& p, State x, double k0, double k1, int steps) {
  for (int s = 0; s < steps; ++s) {
    const double tau = std::clamp(-(k0 * x[0] + k1 * x[1]), -p.torque_limit, p.torque_limit);
    const double acc =
        (p.mass * p.gravity * p.length * std::sin(x[0]) - p.friction * x[1] + tau) / (p.mass * p.length * p.length);
    x[1] += p.dt * acc;
    x[0] += p.dt * x[1];
  }
  return x;
}

PendulumParams default_params() { return PendulumParams{}; }

}  // namespace

TEST_CASE("upright equilibrium is a fixed point") {
  const auto p = default_params();
  const auto ctrl = lqr_controller(p);
  const State next = step(p, {0.0, 0.0}, ctrl);
  CHECK(next[0] == 0.0);
  CHECK(next[1] == 0.0);
}

TEST_CASE("angular acceleration at the horizontal") {
  const auto p = default_params();
  CHECK(angular_acceleration(p, {std::numbers::pi / 2, 0.0}, 0.0) ==
        doctest::Approx(p.gravity / p.length).epsilon(1e-14));
}

TEST_CASE("step matches an independent semi-implicit integrator") {
  const auto p = default_params();
  const auto ctrl = lqr_controller(p);
  for (State x : {State{0.3, -1.0}, State{-1.7, 3.2}, State{2.0, 4.0}}) {
    const State a = simulate(p, x, ctrl, 37);
    const State b = oracle_simulate(p, x, ctrl.gain[0], ctrl.gain[1], 37);
    CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-13));
    CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-13));
  }
}

TEST_CASE("LQR stabilises a small perturbation") {
  const auto p = default_params();
  const auto ctrl = lqr_controller(p);
  State x{0.05, 0.0};
  bool settled = false;
  for (int s = 0; s < 500 && !settled; ++s) {
    x = step(p, x, ctrl);
    settled = std::hypot(x[0], x[1]) < 1e-3;
  }
  CHECK(settled);
}

TEST_CASE("dlqr agrees with policy iteration on a double integrator") {
  const double h = 0.1;
  Eigen::MatrixXd A(2, 2), B(2, 1), Q(2, 2), R(1, 1);
  A << 1, h, 0, 1;
  B << 0.5 * h * h, h;
  Q << 2, 0.3, 0.3, 1;
  R << 0.7;
  Eigen::MatrixXd K0(1, 2);
  K0 << 1.0, 1.5;  // stabilising start
  REQUIRE(spectral_radius(A - B * K0) < 1.0);
  const Eigen::MatrixXd expect = policy_iteration_lqr(A, B, Q, R, K0);
  const Eigen::MatrixXd got = dlqr(A, B, Q, R);
  CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("pendulum LQR agrees with policy iteration") {
  const auto p = default_params();
  const auto sys = linearize(p);
  Eigen::MatrixXd K0(1, 2);
  K0 << 3.0, 1.0;
  REQUIRE(spectral_radius(sys.A - sys.B * K0) < 1.0);
  const Eigen::MatrixXd expect =
      policy_iteration_lqr(sys.A, sys.B, Eigen::Matrix2d::Identity(), Eigen::MatrixXd::Ones(1, 1), K0);
  const auto ctrl = lqr_controller(p);
  CHECK(std::abs(ctrl.gain[0] - expect(0, 0)) < 1e-8);
  CHECK(std::abs(ctrl.gain[1] - expect(0, 1)) < 1e-8);
}

TEST_CASE("expensive control drives the gain to zero on a stable plant") {
  Eigen::MatrixXd A(2, 2), B(2, 1);
  A << 0.9, 0.1, 0.0, 0.8;
  B << 0.0, 1.0;
  double previous = std::numeric_limits<double>::infinity();
  for (double r : {1.0, 1e2, 1e4, 1e6}) {
    const double norm = dlqr(A, B, Eigen::Matrix2d::Identity(), Eigen::MatrixXd::Constant(1, 1, r)).norm();
    CHECK(norm < previous);
    previous = norm;
  }
  CHECK(previous < 1e-5);
}

TEST_CASE("closed-loop eigenvalues lie inside the unit circle") {
  const auto p = default_params();
  const auto sys = linearize(p);
  const auto ctrl = lqr_controller(p);
  const Eigen::Matrix2d Acl = sys.A - sys.B * ctrl.gain;
  const double tr = Acl.trace();
  const double det = Acl.determinant();
  const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det));
  const double m1 = std::abs(0.5 * (tr + disc));
  const double m2 = std::abs(0.5 * (tr - disc));
  CHECK(m1 < 1.0);
  CHECK(m2 < 1.0);
  CHECK(spectral_radius(Acl) == doctest::Approx(std::max(m1, m2)).epsilon(1e-12));
  CHECK(spectral_radius(sys.A) > 1.0);
}

TEST_CASE("dlqr rejects bad input") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 1);
  CHECK_THROWS_AS(dlqr(A, B, A, Eigen::MatrixXd::Ones(1, 1)), DimensionError);
  // Uncontrollable unstable mode: the Riccati iterate grows without bound.
  Eigen::MatrixXd A2(2, 2), B2(2, 1);
  A2 << 1.5, 0, 0, 0.5;
  B2 << 0, 1;
  CHECK_THROWS_AS(dlqr(A2, B2, Eigen::Matrix2d::Identity(), Eigen::MatrixXd::Ones(1, 1), 1e-12, 2000),
                  ConvergenceError);
  PendulumParams bad;
  bad.mass = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("ground-truth grid layout and content") {
  const auto p = default_params();
  const auto ctrl = lqr_controller(p);
  const StateBox box;
  const RoaGrid g = compute_roa_grid(p, ctrl, box, 11, 2000, 1e-2);
  REQUIRE(g.size() == 121);
  CHECK(g.points(0, 0) == doctest::Approx(-box.half_width[0]));
  CHECK(g.points(1, 0) == doctest::Approx(-box.half_width[1]));
  CHECK(g.points(0, 1) > g.points(0, 0));
  CHECK(g.points(1, 1) == g.points(1, 0));
  CHECK(g.points(0, 120) == doctest::Approx(box.half_width[0]));
  CHECK(g.safe[60] == 1);  // centre cell is the origin
  int count = 0;
  for (int k = 0; k < g.size(); ++k) {
    const State end = oracle_simulate(p, {g.points(0, k), g.points(1, k)}, ctrl.gain[0], ctrl.gain[1], 2000);
    const bool safe = std::hypot(end[0], end[1]) < 1e-2;
    CHECK(static_cast<bool>(g.safe[k]) == safe);
    count += safe;
  }
  CHECK(g.safe_count == count);
  CHECK(count < g.size());
}

TEST_CASE("grid cache round trip") {
  const auto p = default_params();
  const auto ctrl = lqr_controller(p);
  const auto dir = std::filesystem::temp_directory_path() / "harvest_test_roa";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const RoaGrid a = load_or_compute_roa_grid(p, ctrl, StateBox{}, dir, 15, 500, 1e-2);
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  const RoaGrid b = load_or_compute_roa_grid(p, ctrl, StateBox{}, dir, 15, 500, 1e-2);
  CHECK(a.safe == b.safe);
  CHECK(a.points == b.points);
  PendulumParams q = p;
  q.torque_limit = 0.4;
  load_or_compute_roa_grid(q, ctrl, StateBox{}, dir, 15, 500, 1e-2);
  files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("default torque limit leaves part of the box outside the region of attraction") {
  const auto p = default_params();
  const RoaGrid g = compute_roa_grid(p, lqr_controller(p), StateBox{}, 41);
  CHECK(g.safe_count > 0);
  CHECK(g.safe_count < g.size());
  CHECK(p.torque_limit < p.mass * p.gravity * p.length);
}

TEST_CASE("level-set samples satisfy the acceptance predicate") {
  const auto spec = nn::LyapunovNet::default_feature_spec();
  const auto net = nn::LyapunovNet::make(spec, 3, 1e-3, {2.0943951023931953, 4.0});
  nn::LyapunovEvaluator eval(spec);
  Rng rng = make_rng(5, "test");
  const StateBox box;
  const double c = 0.05;
  for (double alpha : {1.0, 1.7}) {
    const Eigen::MatrixXd X = sample_level_set(eval, net, box, c, alpha, 300, rng);
    REQUIRE(X.cols() == 300);
    const Eigen::VectorXd v = eval.values(net, X);
    CHECK(v.maxCoeff() <= alpha * c);
    for (int n = 0; n < X.cols(); ++n) CHECK(box.contains({X(0, n), X(1, n)}));
  }
  CHECK_THROWS_AS(sample_level_set(eval, net, box, c, 0.9, 10, rng), SamplingError);
  CHECK_THROWS_AS(sample_level_set(eval, net, box, 0.0, 1.2, 10, rng), SamplingError);
}

TEST_CASE("level-set acceptance rate matches the disk area") {
  const double eps = 1e-3;
  const auto net = quadratic_net(eps);
  nn::LyapunovEvaluator eval(net.feature);
  Rng rng = make_rng(11, "test");
  const StateBox box;
  const double radius = 1.5;
  const int count = 20000;
  long proposed = 0;
  const Eigen::MatrixXd X = sample_level_set(eval, net, box, eps * radius * radius, 1.0, count, rng, 1000000, &proposed);
  const double expect = std::numbers::pi * radius * radius / box.area();
  const double rate = static_cast<double>(count) / static_cast<double>(proposed);
  const double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(proposed));
  CHECK(std::abs(rate - expect) < 3.0 * sigma);
  for (int n = 0; n < X.cols(); ++n) CHECK(X.col(n).norm() <= radius * (1 + 1e-12));
}

TEST_CASE("degenerate level set is reported") {
  const auto net = quadratic_net(1e-3);
  nn::LyapunovEvaluator eval(net.feature);
  Rng rng = make_rng(2, "test");
  CHECK_THROWS_AS(sample_level_set(eval, net, StateBox{}, 1e-12, 1.0, 10, rng), SamplingError);
}

TEST_CASE("labeling of known states") {
  const auto p = default_params();
  const auto ctrl = lqr_controller(p);
  const auto net = quadratic_net(1.0);
  nn::LyapunovEvaluator eval(net.feature);
  Eigen::MatrixXd X(2, 2);
  X << 0.0, std::numbers::pi, 0.0, 0.0;
  for (double c : {1e-6, 0.1, 1.0}) {
    const Labels y = label_batch(p, ctrl, eval, net, X, c, 100);
    CHECK(y[0] == 1);
    CHECK(y[1] == 0);
  }
  CHECK_THROWS_AS(label_batch(p, ctrl, eval, net, X, 0.1, 0), ConfigError);
}

TEST_CASE("labeling matches a hand-simulated batch") {
  const auto p = default_params();
  const auto ctrl = lqr_controller(p);
  const double eps = 1.0;
  const auto net = quadratic_net(eps);
  nn::LyapunovEvaluator eval(net.feature);
  Eigen::MatrixXd X(2, 5);
  X << 0.1, 1.0, -1.5, 2.0, -0.4,
       0.2, -1.0, 3.0, 2.0, -2.5;
  const double c = 0.05;
  const int T = 100;
  int expect = 0;
  std::vector<unsigned char> oracle;
  for (int n = 0; n < 5; ++n) {
    const State end = oracle_simulate(p, {X(0, n), X(1, n)}, ctrl.gain[0], ctrl.gain[1], T);
    const bool in = eps * (end[0] * end[0] + end[1] * end[1]) <= c;
    oracle.push_back(in);
    expect += in;
  }
  const Labels y = label_batch(p, ctrl, eval, net, X, c, T);
  CHECK(y == oracle);
  CHECK(expect > 0);
  CHECK(expect < 5);
}

TEST_CASE("longer horizons never rescue divergent states") {
  const auto p = default_params();
  const auto ctrl = lqr_controller(p);
  const RoaGrid g = compute_roa_grid(p, ctrl, StateBox{}, 21);
  std::vector<int> divergent;
  for (int k = 0; k < g.size(); ++k) {
    const State end = simulate(p, {g.points(0, k), g.points(1, k)}, ctrl, 2000);
    if (std::abs(end[0]) > 1.0) divergent.push_back(k);
  }
  REQUIRE(divergent.size() > 10);
  Eigen::MatrixXd X(2, divergent.size());
  for (std::size_t i = 0; i < divergent.size(); ++i) X.col(i) = g.points.col(divergent[i]);
  const auto net = quadratic_net(1.0);
  nn::LyapunovEvaluator eval(net.feature);
  for (int T : {100, 200, 500, 1000, 2000}) {
    const Labels y = label_batch(p, ctrl, eval, net, X, 0.5, T);
    CHECK(std::count(y.begin(), y.end(), 1) == 0);
  }
}

TEST_CASE("hinge loss hand value and zero-loss batch") {
  const double eps = 1.0;
  const auto net = quadratic_net(eps);
  nn::LyapunovEvaluator eval(net.feature);
  const double c = 0.5;
  Eigen::MatrixXd X(2, 3);
  X << 0.0, 1.0, 0.0, 0.0, 0.0, 2.0;  // v = 0, 1, 4
  const Labels separated{1, 0, 0};
  CHECK(hinge_loss(eval, net, X, separated, c) == 0.0);
  // Safe at v=1: 1 - (0.5 - 1)/0.5 = 2. Unsafe at v=0: 1 + 1 = 2. Unsafe at v=4: 1 + (0.5-4)/0.5 < 0.
  const Labels mixed{0, 1, 0};
  CHECK(hinge_loss(eval, net, X, mixed, c) == doctest::Approx(4.0 / 3.0));

  auto trained = nn::LyapunovNet::make(nn::MlpSpec::tanh_mlp(2, {8}, 4), 4, 1e-3);
  X << 0.0, 5.0, -5.0, 0.0, 0.0, 0.0;
  nn::LyapunovEvaluator eval2(trained.feature);
  const Eigen::VectorXd v = eval2.values(trained, X);
  const double c2 = std::min(v[1], v[2]) / 2.0;
  const auto before = trained.params;
  nn::AdamState adam(trained.params.size());
  const double loss = classifier_update(eval2, trained, X, separated, c2, 5, adam);
  CHECK(loss == 0.0);
  CHECK(trained.params == before);
}

TEST_CASE("hinge gradient matches finite differences") {
  auto net = nn::LyapunovNet::make(nn::MlpSpec::tanh_mlp(2, {6}, 3), 8, 1e-2, {2.0, 4.0});
  nn::LyapunovEvaluator eval(net.feature);
  Eigen::MatrixXd X(2, 4);
  X << 0.3, -1.2, 1.9, -0.5, 0.8, 2.5, -3.1, -0.2;
  const Labels y{1, 0, 1, 0};
  const Eigen::VectorXd v = eval.values(net, X);
  const double c = v.mean();
  std::vector<double> grad(net.params.size(), 0.0);
  hinge_loss(eval, net, X, y, c, grad);
  const double h = 1e-6;
  for (std::size_t i = 0; i < net.params.size(); i += 5) {
    auto up = net;
    auto dn = net;
    up.params[i] += h;
    dn.params[i] -= h;
    const double fd = (hinge_loss(eval, up, X, y, c) - hinge_loss(eval, dn, X, y, c)) / (2 * h);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5).scale(1e-7));
  }
}

TEST_CASE("flipping labels negates the gradient inside the hinge") {
  auto net = nn::LyapunovNet::make(nn::MlpSpec::tanh_mlp(2, {6}, 3), 9, 1e-2);
  nn::LyapunovEvaluator eval(net.feature);
  Eigen::MatrixXd X(2, 4);
  X << 0.3, -1.2, 1.9, -0.5, 0.8, 2.5, -3.1, -0.2;
  const double c = eval.values(net, X).maxCoeff();  // every v < 2c and every v > 0
  const Labels y{1, 0, 1, 1};
  const Labels flipped{0, 1, 0, 0};
  std::vector<double> g1(net.params.size(), 0.0), g2(net.params.size(), 0.0);
  hinge_loss(eval, net, X, y, c, g1);
  hinge_loss(eval, net, X, flipped, c, g2);
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == doctest::Approx(-g1[i]).epsilon(1e-12).scale(1e-15));
}

TEST_CASE("a misclassified safe point is pulled into the level set") {
  auto net = nn::LyapunovNet::make(nn::MlpSpec::tanh_mlp(2, {16}, 8), 12, 1e-3);
  nn::LyapunovEvaluator eval(net.feature);
  Eigen::MatrixXd X(2, 1);
  X << 1.5, -2.0;
  const double c = 0.5 * eval.values(net, X)[0];
  const Labels y{1};
  nn::AdamState adam(net.params.size(), {.lr = 1e-3});
  double previous = hinge_loss(eval, net, X, y, c);
  REQUIRE(previous > 1.0);
  for (int s = 0; s < 50; ++s) {
    classifier_update(eval, net, X, y, c, 1, adam);
    const double now = hinge_loss(eval, net, X, y, c);
    CHECK(now < previous);
    previous = now;
  }
}

TEST_CASE("hinge loss rejects bad input") {
  const auto net = quadratic_net(1.0);
  nn::LyapunovEvaluator eval(net.feature);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(hinge_loss(eval, net, X, Labels{1}, 0.5), DimensionError);
  CHECK_THROWS_AS(hinge_loss(eval, net, Eigen::MatrixXd(2, 0), Labels{}, 0.5), SamplingError);
  CHECK_THROWS(hinge_loss(eval, net, X, Labels{1, 0}, 0.0));
}

TEST_CASE("level update takes the maximum over the safe set") {
  const auto net = quadratic_net(1.0);
  nn::LyapunovEvaluator eval(net.feature);
  Eigen::MatrixXd X(2, 4);
  X << std::sqrt(0.2), 0.0, 0.0, 3.0, 0.0, std::sqrt(0.5), -std::sqrt(0.4), 0.0;
  const Labels y{1, 1, 1, 0};
  const LevelUpdate u = update_level(eval, net, X, y, 0.1);
  CHECK(u.level == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_FALSE(u.stalled);
  const Eigen::VectorXd v = eval.values(net, X);
  for (int n = 0; n < 4; ++n) {
    if (y[n]) CHECK(v[n] <= u.level);
  }
}

TEST_CASE("degenerate safe sets keep the previous level") {
  const auto net = quadratic_net(1.0);
  nn::LyapunovEvaluator eval(net.feature);
  Eigen::MatrixXd origin = Eigen::MatrixXd::Zero(2, 1);
  LevelUpdate u = update_level(eval, net, origin, Labels{1}, 0.3);
  CHECK(u.level == 0.3);
  CHECK(u.stalled);
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(2, 3);
  u = update_level(eval, net, X, Labels{0, 0, 0}, 0.2);
  CHECK(u.level == 0.2);
  CHECK(u.stalled);
}

TEST_CASE("safe-set fraction on a disk covering half the safe cells") {
  const auto p = default_params();
  const RoaGrid g = compute_roa_grid(p, lqr_controller(p), StateBox{}, 61);
  const double eps = 1e-2;
  const auto net = quadratic_net(eps);
  nn::LyapunovEvaluator eval(net.feature);
  std::vector<double> r2;
  for (int k = 0; k < g.size(); ++k) {
    if (g.safe[k]) r2.push_back(g.points.col(k).squaredNorm());
  }
  std::nth_element(r2.begin(), r2.begin() + r2.size() / 2, r2.end());
  const double c = eps * r2[r2.size() / 2];
  const double f = safe_set_fraction(eval, net, c, g);
  CHECK(std::abs(f - 0.5) <= 2.0 / g.safe_count + 1e-12);
}

TEST_CASE("safe-set fraction is bounded and monotone in the level") {
  const auto p = default_params();
  const RoaGrid g = compute_roa_grid(p, lqr_controller(p), StateBox{}, 31);
  const auto net = nn::LyapunovNet::make(nn::LyapunovNet::default_feature_spec(), 21, 1e-3, {2.1, 4.0});
  nn::LyapunovEvaluator eval(net.feature);
  const Eigen::VectorXd v = eval.values(net, g.points);
  double previous = 0.0;
  double previous_level = 0.0;
  for (double c = 1e-4; c < 10.0 * v.maxCoeff(); c *= 1.5) {
    const double f = safe_set_fraction(v, c, g);
    const double lf = level_fraction(v, c);
    CHECK(f >= previous);
    CHECK(lf >= previous_level);
    CHECK(f <= 1.0);
    CHECK(lf <= 1.0);
    previous = f;
    previous_level = lf;
  }
  CHECK(previous == 1.0);
  CHECK(previous_level == 1.0);
  CHECK_THROWS_AS(safe_set_fraction(Eigen::VectorXd::Zero(3), 1.0, g), DimensionError);
}

TEST_CASE("initial level is certified by simulation") {
  const auto p = default_params();
  const auto ctrl = lqr_controller(p);
  const StateBox box;
  const auto net = nn::LyapunovNet::make(nn::LyapunovNet::default_feature_spec(), 2, 1e-3, {box.half_width[0], box.half_width[1]});
  nn::LyapunovEvaluator eval(net.feature);
  const double c0 = initial_level(eval, net, p, ctrl, box);
  CHECK(c0 > 0.0);
  Rng rng = make_rng(1, "test");
  const Eigen::MatrixXd X = sample_level_set(eval, net, box, c0, 1.0, 200, rng);
  for (int n = 0; n < X.cols(); ++n) {
    const State end = simulate(p, {X(0, n), X(1, n)}, ctrl, 2000);
    CHECK(std::hypot(end[0], end[1]) < 1e-2);
  }
}

TEST_CASE("ROA session grows the certified set and is reproducible") {
  RoaConfig cfg;
  cfg.batch = 200;
  cfg.inner_iterations = 3;
  cfg.grid_resolution = 41;
  const auto ctrl = lqr_controller(cfg.pendulum);
  auto grid = std::make_shared<const RoaGrid>(compute_roa_grid(cfg.pendulum, ctrl, cfg.box, cfg.grid_resolution));
  RoaSession a(cfg, grid, ctrl, 7);
  RoaSession b(cfg, grid, ctrl, 7);
  const double start = a.safe_set_fraction();
  RoaSession::Step last;
  for (int k = 0; k < 4; ++k) {
    last = a.advance(1.5);
    const auto other = b.advance(1.5);
    CHECK(last.level == other.level);
    CHECK(last.safe_ratio == other.safe_ratio);
    CHECK(last.safe_ratio >= 0.0);
    CHECK(last.safe_ratio <= 1.0);
    CHECK(last.level > 0.0);
  }
  CHECK(last.level_fraction > 0.0);
  CHECK(a.safe_set_fraction() > start);
  CHECK_THROWS_AS(a.advance(0.5), ConfigError);
}
