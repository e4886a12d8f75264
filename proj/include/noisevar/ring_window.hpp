#pragma once

#include <cstddef>
#include <vector>

#include "noisevar/errors.hpp"

namespace noisevar {

// Fixed-capacity FIFO over a circular buffer. Pushing into a full window
// evicts the oldest element. Element 0 is the oldest.
template <typename T>
class RingWindow {
 public:
  RingWindow() = default;

  explicit RingWindow(std::size_t capacity) : buffer_(capacity) {
    if (capacity == 0) throw ContractError("RingWindow capacity must be positive");
  }

  std::size_t capacity() const noexcept { return buffer_.size(); }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  bool full() const noexcept { return size_ == buffer_.size(); }

  void push(const T& value) {
    if (buffer_.empty()) throw ContractError("push into a zero-capacity RingWindow");
    const std::size_t slot = (head_ + size_) % buffer_.size();
    buffer_[slot] = value;
    if (full()) {
      head_ = (head_ + 1) % buffer_.size();
    } else {
      ++size_;
    }
  }

  const T& operator[](std::size_t i) const { return buffer_[(head_ + i) % buffer_.size()]; }
  const T& oldest() const { return (*this)[0]; }
  const T& newest() const { return (*this)[size_ - 1]; }

  void clear() noexcept {
    head_ = 0;
    size_ = 0;
  }

  // Oldest-first copy, reusing the caller's storage.
  void copy_to(std::vector<T>& out) const {
    out.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = (*this)[i];
  }

  std::vector<T> to_vector() const {
    std::vector<T> out;
    copy_to(out);
    return out;
  }

 private:
  std::vector<T> buffer_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

}  // namespace noisevar
