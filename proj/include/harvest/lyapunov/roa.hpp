#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "harvest/lyapunov/pendulum.hpp"

namespace harvest::lyapunov {

/// Axis-aligned state box [-half_width[0], half_width[0]] x [-half_width[1], half_width[1]].
struct StateBox {
  std::array<double, 2> half_width{2.0943951023931953, 4.0};

  bool contains(const State& x) const {
    return std::abs(x[0]) <= half_width[0] && std::abs(x[1]) <= half_width[1];
  }
  double area() const { return 4.0 * half_width[0] * half_width[1]; }
};

/// Ground-truth region of attraction on a lattice over the state box, by
/// long-horizon simulation. Independent of any Lyapunov candidate.
struct RoaGrid {
  StateBox box;
  int resolution = 101;
  int horizon = 2000;
  double tolerance = 1e-2;
  /// 2 x resolution^2, row-major with phi fastest.
  Eigen::MatrixXd points;
  std::vector<unsigned char> safe;
  int safe_count = 0;

  int size() const { return static_cast<int>(safe.size()); }
};

/// Lattice including the box corners; a point is safe when the state norm after
/// `horizon` steps is below `tolerance`.
RoaGrid compute_roa_grid(const PendulumParams& params, const LinearController& ctrl, const StateBox& box,
                         int resolution = 101, int horizon = 2000, double tolerance = 1e-2);

/// As compute_roa_grid, reusing a file in `cache_dir` keyed by every input.
/// An empty cache_dir disables caching.
RoaGrid load_or_compute_roa_grid(const PendulumParams& params, const LinearController& ctrl,
                                 const StateBox& box, const std::filesystem::path& cache_dir,
                                 int resolution = 101, int horizon = 2000, double tolerance = 1e-2);

}  // namespace harvest::lyapunov
