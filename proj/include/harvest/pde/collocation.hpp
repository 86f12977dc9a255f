#pragma once

#include <vector>

#include <Eigen/Dense>

#include "harvest/common/rng.hpp"
#include "harvest/pde/problem.hpp"

namespace harvest::pde {

inline constexpr int kDefaultBoundaryCount = 50;

/// Points are stored as 2 x N matrices, row 0 = x, row 1 = t.
struct CollocationSet {
  Eigen::MatrixXd interior;
  /// One matrix per entry of PdeProblem::boundary.
  std::vector<Eigen::MatrixXd> boundary;

  int interior_count() const { return static_cast<int>(interior.cols()); }
  int boundary_count() const;
};

/// i.i.d. uniform points strictly inside the domain.
Eigen::MatrixXd uniform_interior(const Domain& domain, int count, Rng& rng);

/// `count` boundary points split evenly over the pieces (largest remainder),
/// uniform along each piece.
std::vector<Eigen::MatrixXd> sample_boundary(const PdeProblem& problem, int count, Rng& rng);

}  // namespace harvest::pde
