// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "risim/numerics.hpp"

namespace risim {

struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

/// Fixed-capacity FIFO transition store with uniform batch sampling
/// (distinct indices within a batch).
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) {
            throw std::invalid_argument("ReplayBuffer: zero capacity");
        }
        store_.reserve(capacity);
    }

    void push(Transition t) {
        if (store_.size() < capacity_) {
            store_.push_back(std::move(t));
        } else {
            store_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    std::size_t size() const { return store_.size(); }
    std::size_t capacity() const { return capacity_; }

    /// i-th oldest stored transition.
    const Transition& at(std::size_t i) const {
        return store_[store_.size() < capacity_ ? i : (head_ + i) % capacity_];
    }

    std::vector<std::size_t> sample_indices(std::size_t batch, RngStream& rng) const {
        if (batch > size()) {
            throw std::invalid_argument("ReplayBuffer: batch larger than stored transitions");
        }
        std::vector<std::size_t> idx;
        idx.reserve(batch);
        if (batch * 2 >= size()) {
            // Partial Fisher-Yates when the batch covers much of the buffer.
            std::vector<std::size_t> all(size());
            for (std::size_t i = 0; i < all.size(); ++i) {
                all[i] = i;
            }
            for (std::size_t i = 0; i < batch; ++i) {
                const std::size_t j = i + rng.next_u64() % (all.size() - i);
                std::swap(all[i], all[j]);
                idx.push_back(all[i]);
            }
        } else {
            std::vector<bool> used(size(), false);
            while (idx.size() < batch) {
                const std::size_t j = rng.next_u64() % size();
                if (!used[j]) {
                    used[j] = true;
                    idx.push_back(j);
                }
            }
        }
        return idx;
    }

    const Transition& operator[](std::size_t raw) const { return store_[raw]; }

  private:
    std::size_t capacity_;
    std::vector<Transition> store_;
    std::size_t head_ = 0;
};

}  // namespace risim
