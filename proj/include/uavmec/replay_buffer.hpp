#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "uavmec/rng.hpp"

namespace uavmec {

struct Transition {
  std::vector<double> observation;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next_observation;
  bool terminal = false;
};

/// Fixed-capacity ring of transitions; once full, each push evicts the oldest.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
    storage_.reserve(capacity);
  }

  void push(Transition t) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(t));
    } else {
      storage_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const { return storage_.at((head_ + i) % storage_.size()); }

  /// `count` distinct entries chosen uniformly, returned as offsets usable
  /// with at().
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // oldest entry once the ring has wrapped
  std::vector<Transition> storage_;
};

}  // namespace uavmec
