#include "pcmas/replay.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace pcmas::mfac {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
  store_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition transition) {
  if (store_.size() < capacity_) {
    store_.push_back(std::move(transition));
  } else {
    store_[next_] = std::move(transition);
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  const std::size_t n = std::min(batch_size, store_.size());
  std::vector<const Transition*> batch;
  batch.reserve(n);
  if (n * 2 >= store_.size()) {
    // Dense draw: partial Fisher-Yates over all indices.
    std::vector<std::size_t> indices(store_.size());
    std::iota(indices.begin(), indices.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, indices.size() - 1);
      std::swap(indices[i], indices[pick(rng)]);
      batch.push_back(&store_[indices[i]]);
    }
  } else {
    // Sparse draw: rejection sampling of distinct indices.
    std::unordered_set<std::size_t> seen;
    std::uniform_int_distribution<std::size_t> pick(0, store_.size() - 1);
    while (batch.size() < n) {
      const std::size_t i = pick(rng);
      if (seen.insert(i).second) batch.push_back(&store_[i]);
    }
  }
  return batch;
}

}  // namespace pcmas::mfac
