#include "daqn/qlearn/replay.hpp"

#include <random>
#include <stdexcept>

namespace daqn {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  items_.reserve(capacity);
}

void ReplayMemory::push(Transition t) {
  if (items_.size() < capacity_)
    items_.push_back(std::move(t));
  else
    items_[inserted_ % capacity_] = std::move(t);
  ++inserted_;
}

std::vector<const Transition*> ReplayMemory::sample(std::size_t batch, Rng& rng) const {
  if (items_.empty()) throw std::logic_error("cannot sample from an empty replay memory");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<const Transition*> out(batch);
  for (auto& p : out) p = &items_[pick(rng)];
  return out;
}

const Transition& ReplayMemory::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("replay index out of range");
  if (items_.size() < capacity_) return items_[i];
  return items_[(inserted_ + i) % capacity_];
}

}  // namespace daqn
