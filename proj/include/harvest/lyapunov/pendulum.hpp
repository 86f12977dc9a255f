#pragma once

#include <array>

#include <Eigen/Dense>

namespace harvest::lyapunov {

/// (phi, phi_dot): angle from upright and angular velocity.
using State = std::array<double, 2>;

struct PendulumParams {
  double mass = 0.15;
  double length = 0.5;
  double gravity = 9.81;
  double friction = 0.1;
  double torque_limit = 0.5;
  double dt = 0.01;

  /// Throws ConfigError unless every constant is positive and finite.
  void validate() const;
  bool operator==(const PendulumParams&) const = default;
};

/// Saturated linear state feedback tau = clamp(-K x, -limit, limit).
struct LinearController {
  Eigen::RowVector2d gain = Eigen::RowVector2d::Zero();
  double limit = 0.0;

  double torque(const State& x) const;
};

/// phi_ddot from m l^2 phi_ddot = m g l sin(phi) - beta phi_dot + tau.
double angular_acceleration(const PendulumParams& p, const State& x, double torque);

/// One semi-implicit Euler step under the controller.
State step(const PendulumParams& p, const State& x, const LinearController& ctrl);

State simulate(const PendulumParams& p, const State& x, const LinearController& ctrl, int steps);

/// Linearization at the upright equilibrium, discretized the same way step() integrates.
struct LinearSystem {
  Eigen::Matrix2d A;
  Eigen::Vector2d B;
};
LinearSystem linearize(const PendulumParams& p);

/// Discrete-time LQR gain K (u = -K x) by fixed-point iteration of the
/// Riccati recursion. Throws ConvergenceError if it does not settle within
/// max_iterations to relative tolerance `tolerance`.
Eigen::MatrixXd dlqr(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                     const Eigen::MatrixXd& R, double tolerance = 1e-12, int max_iterations = 100000);

/// LQR controller for the pendulum with its torque limit.
LinearController lqr_controller(const PendulumParams& p, const Eigen::Matrix2d& Q = Eigen::Matrix2d::Identity(),
                                double R = 1.0);

double spectral_radius(const Eigen::MatrixXd& M);

}  // namespace harvest::lyapunov
