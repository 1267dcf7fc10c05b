/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace sfnr {

/// Sliding window of squared prequential errors.
class PrequentialWindow {
public:
  explicit PrequentialWindow(std::size_t window_size = 10000) : capacity_(window_size) {
    if (capacity_ == 0) throw std::invalid_argument("prequential window size must be >= 1");
    buffer_.reserve(capacity_);
  }

  /// Records (prediction − truth)² and returns the RMSE over the window.
  double update(double prediction, double truth) {
    const double r = prediction - truth;
    const double sq = r * r;
    if (buffer_.size() < capacity_) {
      buffer_.push_back(sq);
    } else {
      sum_ -= buffer_[head_];
      buffer_[head_] = sq;
      head_ = (head_ + 1) % capacity_;
    }
    sum_ += sq;
    // Exact resync once per window turnover bounds the running-sum error.
    if (++pushes_ % capacity_ == 0) {
      sum_ = 0.0;
      for (double v : buffer_) sum_ += v;
    }
    return rmse();
  }

  double rmse() const {
    if (buffer_.empty()) return 0.0;
    return std::sqrt(std::max(0.0, sum_) / static_cast<double>(buffer_.size()));
  }

  std::size_t size() const { return buffer_.size(); }
  std::size_t window_size() const { return capacity_; }

  /// Retained squared errors, oldest first.
  std::vector<double> contents() const {
    std::vector<double> out;
    out.reserve(buffer_.size());
    for (std::size_t i = 0; i < buffer_.size(); ++i) out.push_back(buffer_[(head_ + i) % buffer_.size()]);
    return out;
  }

private:
  std::size_t capacity_;
  std::vector<double> buffer_;
  std::size_t head_ = 0;
  double sum_ = 0.0;
  std::size_t pushes_ = 0;
};

}  // namespace sfnr
