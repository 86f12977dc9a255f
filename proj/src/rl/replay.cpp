#include "harvest/rl/replay.hpp"

#include <cmath>
#include <string>

#include "harvest/common/error.hpp"

namespace harvest::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
  if (state_dim <= 0 || action_dim <= 0) throw DimensionError("replay dimensions must be positive");
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_ || t.action.size() != action_dim_) {
    throw DimensionError("transition shape does not match replay buffer (" + std::to_string(state_dim_) + ", " +
                         std::to_string(action_dim_) + ")");
  }
  if (!t.state.allFinite() || !t.next_state.allFinite() || !t.action.allFinite() || !std::isfinite(t.reward)) {
    throw DimensionError("transition has non-finite entries");
  }
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
}

const Transition& ReplayBuffer::operator[](std::size_t i) const {
  if (i >= data_.size()) throw DimensionError("replay index out of range");
  return data_[(head_ + i) % data_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(int count, Rng& rng) const {
  if (data_.empty()) throw SamplingError("cannot sample from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<std::size_t> out(static_cast<std::size_t>(std::max(count, 0)));
  for (auto& i : out) i = pick(rng);
  return out;
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b;
  b.states.resize(state_dim_, n);
  b.actions.resize(action_dim_, n);
  b.rewards.resize(n);
  b.next_states.resize(state_dim_, n);
  b.done.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Transition& t = (*this)[indices[k]];
    b.states.col(k) = t.state;
    b.actions.col(k) = t.action;
    b.rewards[k] = t.reward;
    b.next_states.col(k) = t.next_state;
    b.done[k] = t.done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace harvest::rl
