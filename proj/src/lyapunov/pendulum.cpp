#include "harvest/lyapunov/pendulum.hpp"

#include <algorithm>
#include <cmath>

#include "harvest/common/error.hpp"
#include "harvest/common/format.hpp"

namespace harvest::lyapunov {

void PendulumParams::validate() const {
  const double all[] = {mass, length, gravity, friction, torque_limit, dt};
  for (double v : all) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("pendulum constants must be positive and finite, got " + format_double(v));
    }
  }
}

double LinearController::torque(const State& x) const {
  const double u = -(gain[0] * x[0] + gain[1] * x[1]);
  return std::clamp(u, -limit, limit);
}

double angular_acceleration(const PendulumParams& p, const State& x, double torque) {
  const double inertia = p.mass * p.length * p.length;
  return (p.mass * p.gravity * p.length * std::sin(x[0]) - p.friction * x[1] + torque) / inertia;
}

State step(const PendulumParams& p, const State& x, const LinearController& ctrl) {
  const double omega = x[1] + p.dt * angular_acceleration(p, x, ctrl.torque(x));
  return {x[0] + p.dt * omega, omega};
}

State simulate(const PendulumParams& p, const State& x, const LinearController& ctrl, int steps) {
  State s = x;
  for (int k = 0; k < steps; ++k) s = step(p, s, ctrl);
  return s;
}

LinearSystem linearize(const PendulumParams& p) {
  const double a = p.gravity / p.length;
  const double b = -p.friction / (p.mass * p.length * p.length);
  const double c = 1.0 / (p.mass * p.length * p.length);
  const double h = p.dt;
  LinearSystem sys;
  sys.A << 1.0 + h * h * a, h + h * h * b, h * a, 1.0 + h * b;
  sys.B << h * h * c, h * c;
  return sys;
}

Eigen::MatrixXd dlqr(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                     const Eigen::MatrixXd& R, double tolerance, int max_iterations) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != B.cols() ||
      R.cols() != B.cols()) {
    throw DimensionError("dlqr: inconsistent matrix shapes");
  }
  Eigen::MatrixXd P = Q;
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    const Eigen::MatrixXd K = (R + BtP * B).ldlt().solve(BtP * A);
    Eigen::MatrixXd next = Q + A.transpose() * P * A - A.transpose() * P * B * K;
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) throw ConvergenceError("dlqr: Riccati iterate is not finite");
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = next;
    if (!std::isfinite(change)) throw ConvergenceError("dlqr: Riccati iterate is not finite");
    if (change <= tolerance * std::max(1.0, P.cwiseAbs().maxCoeff())) {
      const Eigen::MatrixXd BtPn = B.transpose() * P;
      return (R + BtPn * B).ldlt().solve(BtPn * A);
    }
  }
  throw ConvergenceError("dlqr: Riccati recursion did not converge in " + std::to_string(max_iterations) +
                         " iterations");
}

LinearController lqr_controller(const PendulumParams& p, const Eigen::Matrix2d& Q, double R) {
  p.validate();
  const LinearSystem sys = linearize(p);
  const Eigen::MatrixXd K = dlqr(sys.A, sys.B, Q, Eigen::MatrixXd::Constant(1, 1, R));
  LinearController ctrl;
  ctrl.gain << K(0, 0), K(0, 1);
  ctrl.limit = p.torque_limit;
  return ctrl;
}

double spectral_radius(const Eigen::MatrixXd& M) {
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace harvest::lyapunov
