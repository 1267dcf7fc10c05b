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
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sfnr {

/// Online regressor contract shared by every expert.
///
/// predict() never mutates state; update() costs O(features); clone_fresh()
/// returns an untrained learner with the same configuration.
class Learner {
public:
  virtual ~Learner() = default;
  virtual double predict(std::span<const double> x) const = 0;
  virtual void update(std::span<const double> x, double y) = 0;
  virtual std::unique_ptr<Learner> clone_fresh() const = 0;
  virtual std::string_view name() const = 0;
};

/// Exponential moving average of the target sequence; features are ignored.
///   EMA_t = (p_{t−1} − EMA_{t−1}) · 2/(w+1) + EMA_{t−1}
/// Predicts 0 until the first update, which seeds EMA with that price.
class EmaLearner final : public Learner {
public:
  explicit EmaLearner(std::size_t window = 5) : window_(window) {
    if (window_ == 0) throw std::invalid_argument("ema window must be >= 1");
    multiplier_ = 2.0 / (static_cast<double>(window_) + 1.0);
  }

  double predict(std::span<const double>) const override { return current_.value_or(0.0); }

  void update(std::span<const double>, double price) override {
    if (!std::isfinite(price)) throw std::invalid_argument("ema: non-finite price");
    if (!current_)
      current_ = price;
    else
      current_ = (price - *current_) * multiplier_ + *current_;
  }

  std::unique_ptr<Learner> clone_fresh() const override { return std::make_unique<EmaLearner>(window_); }
  std::string_view name() const override { return "ema"; }

  std::size_t window() const { return window_; }
  double multiplier() const { return multiplier_; }
  std::optional<double> current() const { return current_; }

private:
  std::size_t window_;
  double multiplier_;
  std::optional<double> current_;
};

/// Squared loss 0.5·(w·x + b − y)² of a linear model on already-scaled inputs.
inline double squared_loss(std::span<const double> weights, double bias, std::span<const double> x, double y) {
  double pred = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) pred += weights[i] * x[i];
  const double r = pred - y;
  return 0.5 * r * r;
}

/// Gradient of squared_loss: (r·x_1, …, r·x_d, r) with r the residual.
/// `grad` must hold weights.size() + 1 entries.
inline void squared_loss_gradient(std::span<const double> weights, double bias, std::span<const double> x, double y,
                                  std::span<double> grad) {
  double pred = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) pred += weights[i] * x[i];
  const double r = pred - y;
  for (std::size_t i = 0; i < weights.size(); ++i) grad[i] = r * x[i];
  grad[weights.size()] = r;
}

inline std::vector<double> squared_loss_gradient(std::span<const double> weights, double bias,
                                                 std::span<const double> x, double y) {
  std::vector<double> grad(weights.size() + 1);
  squared_loss_gradient(weights, bias, x, y, grad);
  return grad;
}

/// Linear model trained by SGD on squared loss, over features standardized
/// with running (Welford) means and variances.
class LinearLearner final : public Learner {
public:
  static constexpr double kVarianceFloor = 1e-8;

  explicit LinearLearner(double learning_rate = 0.01) : lr_(learning_rate) {
    if (!(lr_ > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  }

  double predict(std::span<const double> x) const override {
    if (n_ == 0) return 0.0;
    check_dim(x);
    double out = bias_;
    for (std::size_t i = 0; i < weights_.size(); ++i) out += weights_[i] * scaled(x, i);
    return out;
  }

  void update(std::span<const double> x, double y) override {
    if (n_ == 0) {
      weights_.assign(x.size(), 0.0);
      mean_.assign(x.size(), 0.0);
      m2_.assign(x.size(), 0.0);
    }
    check_dim(x);
    ++n_;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - mean_[i];
      mean_[i] += d / static_cast<double>(n_);
      m2_[i] += d * (x[i] - mean_[i]);
    }
    scratch_.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) scratch_[i] = scaled(x, i);
    grad_.resize(x.size() + 1);
    squared_loss_gradient(weights_, bias_, scratch_, y, grad_);
    for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] -= lr_ * grad_[i];
    bias_ -= lr_ * grad_.back();
  }

  std::unique_ptr<Learner> clone_fresh() const override { return std::make_unique<LinearLearner>(lr_); }
  std::string_view name() const override { return "linear"; }

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  std::size_t updates() const { return n_; }
  double learning_rate() const { return lr_; }

  double variance(std::size_t i) const { return n_ ? m2_.at(i) / static_cast<double>(n_) : 0.0; }

private:
  double scaled(std::span<const double> x, std::size_t i) const {
    return (x[i] - mean_[i]) / std::sqrt(std::max(variance(i), kVarianceFloor));
  }

  void check_dim(std::span<const double> x) const {
    if (x.size() != weights_.size())
      throw std::invalid_argument("linear learner: expected " + std::to_string(weights_.size()) + " features, got " +
                                  std::to_string(x.size()));
  }

  double lr_;
  std::size_t n_ = 0;
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::vector<double> scratch_;
  std::vector<double> grad_;
};

/// Running mean of all targets (Neumaier-compensated sum).
class MeanLearner final : public Learner {
public:
  double predict(std::span<const double>) const override {
    return n_ ? (sum_ + compensation_) / static_cast<double>(n_) : 0.0;
  }

  void update(std::span<const double>, double y) override {
    const double t = sum_ + y;
    if (std::fabs(sum_) >= std::fabs(y))
      compensation_ += (sum_ - t) + y;
    else
      compensation_ += (y - t) + sum_;
    sum_ = t;
    ++n_;
  }

  std::unique_ptr<Learner> clone_fresh() const override { return std::make_unique<MeanLearner>(); }
  std::string_view name() const override { return "mean"; }

private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
  std::size_t n_ = 0;
};

/// Factory by name: "linear", "ema", "mean".
inline std::unique_ptr<Learner> make_learner(std::string_view kind, double learning_rate = 0.01,
                                             std::size_t ema_window = 5) {
  if (kind == "linear") return std::make_unique<LinearLearner>(learning_rate);
  if (kind == "ema") return std::make_unique<EmaLearner>(ema_window);
  if (kind == "mean") return std::make_unique<MeanLearner>();
  throw std::invalid_argument("unknown learner '" + std::string(kind) + "'");
}

}  // namespace sfnr
