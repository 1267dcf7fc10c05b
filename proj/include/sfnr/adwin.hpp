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
#include <deque>
#include <stdexcept>
#include <vector>

namespace sfnr {

/// Threshold on |mean(W0) − mean(W1)| for a split of sizes n0, n1 of a
/// window of size n = n0 + n1 at confidence delta:
///
///   m = 1 / (1/n0 + 1/n1),  eps = sqrt( ln(4n / delta) / (2m) )
inline double epsilon_cut(std::size_t n0, std::size_t n1, std::size_t n, double delta) {
  if (n0 == 0 || n1 == 0) throw std::invalid_argument("epsilon_cut: empty sub-window");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("epsilon_cut: delta must be in (0,1)");
  const double m = 1.0 / (1.0 / static_cast<double>(n0) + 1.0 / static_cast<double>(n1));
  return std::sqrt(std::log(4.0 * static_cast<double>(n) / delta) / (2.0 * m));
}

struct AdwinConfig {
  double delta = 0.1;
  std::size_t capacity = 5000;
  std::size_t check_interval = 32;
};

/// Adaptive window over values in [0,1], kept as a plain buffer.
///
/// After each append (every `check_interval` appends) all splits W = W0·W1 are
/// tested; while any split fails, the oldest value is dropped and the scan is
/// repeated. Segment means come from prefix sums, so a scan is O(|W|).
class Adwin {
public:
  explicit Adwin(AdwinConfig config = {}) : config_(config) {
    if (!(config_.delta > 0.0 && config_.delta < 1.0)) throw std::invalid_argument("adwin: delta must be in (0,1)");
    if (config_.capacity < 1) throw std::invalid_argument("adwin: capacity must be >= 1");
    if (config_.check_interval < 1) throw std::invalid_argument("adwin: check_interval must be >= 1");
  }

  /// Appends a value; true iff the split test dropped at least one element.
  bool add(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("adwin: non-finite value");
    if (value < 0.0 || value > 1.0) {
      value = value < 0.0 ? 0.0 : 1.0;
      ++n_clamped_;
    }
    values_.push_back(value);
    prefix_.push_back((prefix_.empty() ? base_ : prefix_.back()) + value);
    while (values_.size() > config_.capacity) pop_oldest();

    if (++since_check_ < config_.check_interval) return false;
    since_check_ = 0;

    const std::size_t before = values_.size();
    while (values_.size() >= 2 && any_split_fails()) pop_oldest();
    if (values_.size() == before) return false;
    ++n_detections_;
    last_width_before_ = before;
    last_width_after_ = values_.size();
    return true;
  }

  /// Retained window, oldest first.
  std::vector<double> contents() const { return {values_.begin(), values_.end()}; }

  std::size_t width() const { return values_.size(); }

  double mean() const {
    if (values_.empty()) throw std::logic_error("adwin: mean of empty window");
    return segment_sum(0, values_.size()) / static_cast<double>(values_.size());
  }

  /// Sum of values in [begin, end), oldest-first indexing.
  double segment_sum(std::size_t begin, std::size_t end) const {
    if (begin >= end) return 0.0;
    const double lo = begin == 0 ? base_ : prefix_[begin - 1];
    return prefix_[end - 1] - lo;
  }

  std::size_t detections() const { return n_detections_; }
  std::size_t clamped() const { return n_clamped_; }
  std::size_t last_width_before() const { return last_width_before_; }
  std::size_t last_width_after() const { return last_width_after_; }
  const AdwinConfig& config() const { return config_; }

  /// Largest deviation between the stored prefix sums and a fresh summation.
  double prefix_drift() const {
    double acc = base_, worst = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      acc += values_[i];
      worst = std::max(worst, std::fabs(acc - prefix_[i]));
    }
    return worst;
  }

  void reset() {
    values_.clear();
    prefix_.clear();
    base_ = 0.0;
    since_check_ = 0;
  }

private:
  bool any_split_fails() const {
    const std::size_t n = values_.size();
    const double total = segment_sum(0, n);
    // eps^2 = log_term * (1/n0 + 1/n1) / 2; compared squared to skip the sqrt.
    const double log_term = std::log(4.0 * static_cast<double>(n) / config_.delta);
    // Newest split first: W1 grows from the tail.
    for (std::size_t n1 = 1; n1 < n; ++n1) {
      const std::size_t n0 = n - n1;
      const double sum0 = segment_sum(0, n0);
      const double diff = sum0 / static_cast<double>(n0) - (total - sum0) / static_cast<double>(n1);
      const double eps_sq = 0.5 * log_term * (1.0 / static_cast<double>(n0) + 1.0 / static_cast<double>(n1));
      if (diff * diff >= eps_sq) return true;
    }
    return false;
  }

  void pop_oldest() {
    base_ = prefix_.front();
    values_.pop_front();
    prefix_.pop_front();
    // Rebase so the running sums stay small and exact enough.
    if (base_ > kRebaseAt) {
      double acc = 0.0;
      for (std::size_t i = 0; i < values_.size(); ++i) {
        acc += values_[i];
        prefix_[i] = acc;
      }
      base_ = 0.0;
    }
  }

  static constexpr double kRebaseAt = 1024.0;

  AdwinConfig config_;
  std::deque<double> values_;
  std::deque<double> prefix_;  // prefix_[i] = base_ + sum(values_[0..i])
  double base_ = 0.0;
  std::size_t since_check_ = 0;
  std::size_t n_detections_ = 0;
  std::size_t n_clamped_ = 0;
  std::size_t last_width_before_ = 0;
  std::size_t last_width_after_ = 0;
};

}  // namespace sfnr
