#pragma once

#include <cstddef>
#include <vector>

#include "daqn/nnkit/layers.hpp"
#include "daqn/nnkit/tensor.hpp"

namespace daqn {

/// One (s, a, r, s') sample. `terminal` means the next state has no value:
/// the target is the reward alone.
struct Transition {
  Tensor state;
  int action = 0;
  double reward = 0.0;
  Tensor next_state;
  bool terminal = false;
};

/// Fixed-capacity ring buffer; once full, each insert evicts the oldest.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);
  /// Uniform draw with replacement from the current contents.
  std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }
  /// Total number of pushes since construction.
  std::size_t inserted() const { return inserted_; }
  /// i-th oldest transition currently held.
  const Transition& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t inserted_ = 0;
  std::vector<Transition> items_;
};

}  // namespace daqn
