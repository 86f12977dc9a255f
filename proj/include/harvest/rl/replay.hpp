#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "harvest/common/rng.hpp"

namespace harvest::rl {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
};

/// Column-stacked minibatch.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd done;

  int size() const { return static_cast<int>(rewards.size()); }
};

/// Fixed-capacity FIFO of transitions with uniform minibatch sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

  /// Throws DimensionError on a shape mismatch or non-finite entries.
  void push(Transition t);

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool ready(int batch) const { return batch > 0 && size() >= static_cast<std::size_t>(batch); }
  /// i = 0 is the oldest transition held.
  const Transition& operator[](std::size_t i) const;

  /// `count` indices drawn uniformly with replacement.
  std::vector<std::size_t> sample_indices(int count, Rng& rng) const;
  Batch gather(const std::vector<std::size_t>& indices) const;
  Batch sample(int count, Rng& rng) const { return gather(sample_indices(count, rng)); }

 private:
  std::size_t capacity_;
  int state_dim_;
  int action_dim_;
  std::vector<Transition> data_;
  std::size_t head_ = 0;  // position of the oldest element once full
};

}  // namespace harvest::rl
