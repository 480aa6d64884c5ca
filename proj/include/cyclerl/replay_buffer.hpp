// Copyright 2026 The cyclerl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CYCLERL_REPLAY_BUFFER_HPP_
#define CYCLERL_REPLAY_BUFFER_HPP_

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace cyclerl {

/// Fixed-capacity FIFO with uniform sampling (with replacement).
template <class Item>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be > 0");
    items_.reserve(capacity_);
  }

  void push(Item item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[next_] = std::move(item);
    }
    next_ = (next_ + 1) % capacity_;
  }

  /// Indices into the buffer, drawn uniformly.
  template <class Rng>
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const {
    if (items_.empty()) throw std::logic_error("ReplayBuffer: sampling an empty buffer");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<std::size_t> indices(count);
    for (auto& index : indices) index = pick(rng);
    return indices;
  }

  template <class Rng>
  void sample(std::size_t count, Rng& rng, std::vector<Item>& out) const {
    out.clear();
    for (std::size_t index : sample_indices(count, rng)) out.push_back(items_[index]);
  }

  const Item& operator[](std::size_t index) const { return items_[index]; }
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Item> items_;
};

}  // namespace cyclerl

#endif  // CYCLERL_REPLAY_BUFFER_HPP_
