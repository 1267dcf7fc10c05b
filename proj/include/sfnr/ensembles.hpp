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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sfnr/adwin.hpp"
#include "sfnr/centrality.hpp"
#include "sfnr/expert_graph.hpp"
#include "sfnr/learners.hpp"
#include "sfnr/random.hpp"
#include "sfnr/stream.hpp"

namespace sfnr {

/// Centrality-weighted vote H = Σ ζ_d h_d / Σ ζ_k. Falls back to the plain
/// mean when Σζ = 0.
inline double weighted_prediction(std::span<const double> zetas, std::span<const double> predictions) {
  if (predictions.empty()) throw std::invalid_argument("weighted_prediction: no experts");
  if (zetas.size() != predictions.size()) throw std::invalid_argument("weighted_prediction: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    num += zetas[i] * predictions[i];
    den += zetas[i];
  }
  if (den > 0.0) return num / den;
  double mean = 0.0;
  for (double p : predictions) mean += p;
  return mean / static_cast<double>(predictions.size());
}

/// Maps absolute errors into [0,1] for ADWIN and AddExp.
///
/// Either a fixed range R, or the running maximum of absolute errors seen
/// during the first `warmup` instances, frozen afterwards.
class ErrorScale {
public:
  static ErrorScale fixed(double range) {
    if (!(range > 0.0)) throw std::invalid_argument("error scale must be > 0");
    ErrorScale s;
    s.value_ = range;
    s.frozen_ = true;
    return s;
  }

  static ErrorScale running_max(std::size_t warmup = 500) {
    ErrorScale s;
    s.warmup_ = warmup;
    s.frozen_ = warmup == 0;
    return s;
  }

  double normalize(double abs_error) {
    abs_error = std::fabs(abs_error);
    if (!frozen_) {
      value_ = std::max(value_, abs_error);
      if (++seen_ >= warmup_) frozen_ = true;
    }
    return std::clamp(abs_error / std::max(value_, kFloor), 0.0, 1.0);
  }

  double value() const { return value_; }
  bool frozen() const { return frozen_; }

private:
  static constexpr double kFloor = 1e-12;
  double value_ = 0.0;
  std::size_t warmup_ = 0;
  std::size_t seen_ = 0;
  bool frozen_ = false;
};

/// Test-then-train model driven by the prequential runner.
class OnlineModel {
public:
  virtual ~OnlineModel() = default;
  /// Predicts `inst.y` without looking at it, then learns from `inst`.
  virtual double process(const Instance& inst) = 0;
  virtual std::size_t network_size() const = 0;
  virtual std::size_t drift_count() const = 0;
  virtual std::string_view name() const = 0;
};

/// One learner, never reset.
class SingleLearnerModel final : public OnlineModel {
public:
  explicit SingleLearnerModel(std::unique_ptr<Learner> learner, std::string name = "single_learner")
      : learner_(std::move(learner)), name_(std::move(name)) {}

  double process(const Instance& inst) override {
    const double pred = learner_->predict(inst.x);
    learner_->update(inst.x, inst.y);
    return pred;
  }
  std::size_t network_size() const override { return 1; }
  std::size_t drift_count() const override { return 0; }
  std::string_view name() const override { return name_; }
  const Learner& learner() const { return *learner_; }

private:
  std::unique_ptr<Learner> learner_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Scale-free network regressor
// ---------------------------------------------------------------------------

enum class SfnrMode { period, adwin };

struct SfnrConfig {
  CentralityMetric metric = CentralityMetric::eigenvector;
  std::size_t k_max = 10;
  std::size_t edges_per_node = 2;
  SfnrMode mode = SfnrMode::adwin;
  // period mode
  std::size_t period = 1000;
  double threshold = 0.08;
  // adwin mode
  double delta = 0.1;
  std::size_t buffer_size = 500;
  std::size_t check_interval = 32;
  std::size_t adwin_capacity = 5000;
  // shared
  std::size_t error_window = 1000;
  std::optional<double> error_range;  // unset: running max over warmup
  std::size_t warmup = 500;

  void validate() const {
    if (k_max < 2) throw std::invalid_argument("k_max must be >= 2");
    if (edges_per_node < 1) throw std::invalid_argument("edges per node must be >= 1");
    if (mode == SfnrMode::period) {
      if (period < 1) throw std::invalid_argument("period must be >= 1");
      if (!(threshold >= 0.0)) throw std::invalid_argument("threshold must be >= 0");
    } else {
      if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
      if (buffer_size < 1) throw std::invalid_argument("buffer size must be >= 1");
    }
    if (error_range && !(*error_range > 0.0)) throw std::invalid_argument("error range must be > 0");
  }
};

/// A network evolution: triggered at `index`; for ADWIN-triggered ones the
/// detector window width before and after the cut.
struct DriftEvent {
  std::size_t index = 0;
  std::size_t width_before = 0;
  std::size_t width_after = 0;
};

/// Ensemble of online learners arranged as an evolving scale-free network.
///
/// Predictions are the centrality-weighted vote of all experts. In period
/// mode the network evolves at the end of every `period` instances whose
/// ensemble RMSE exceeds `threshold`; in adwin mode it evolves whenever ADWIN,
/// fed the normalized absolute ensemble error, cuts its window. An evolution
/// removes the highest-RMSE expert when the network is at k_max, rewires,
/// adds a fresh expert trained on the recent buffer, and recomputes ζ.
class Sfnr final : public OnlineModel {
public:
  using EvolveHook = std::function<void(const Sfnr&, const DriftEvent&)>;

  Sfnr(SfnrConfig config, std::unique_ptr<Learner> prototype, std::uint64_t seed)
      : config_(std::move(config)),
        prototype_(std::move(prototype)),
        net_(config_.k_max, config_.edges_per_node, config_.error_window),
        adwin_(AdwinConfig{config_.delta, config_.adwin_capacity, config_.check_interval}),
        scale_(config_.error_range ? ErrorScale::fixed(*config_.error_range) : ErrorScale::running_max(config_.warmup)),
        rng_(seed) {
    config_.validate();
    if (!prototype_) throw std::invalid_argument("sfnr: null prototype learner");
    const NodeId seed_id = next_id_++;
    add_node_preferential(net_, seed_id, rng_);
    experts_.emplace(seed_id, prototype_->clone_fresh());
    update_centrality(net_, config_.metric);
  }

  /// Weighted vote of the current experts.
  double predict(std::span<const double> x) const {
    if (experts_.empty()) throw std::logic_error("sfnr: empty network");
    std::vector<double> zetas, preds;
    zetas.reserve(experts_.size());
    preds.reserve(experts_.size());
    for (const auto& [id, learner] : experts_) {
      zetas.push_back(net_.stats(id).zeta);
      preds.push_back(learner->predict(x));
    }
    return weighted_prediction(zetas, preds);
  }

  double process(const Instance& inst) override {
    zetas_.clear();
    preds_.clear();
    for (const auto& [id, learner] : experts_) {
      zetas_.push_back(net_.stats(id).zeta);
      preds_.push_back(learner->predict(inst.x));
    }
    const double prediction = weighted_prediction(zetas_, preds_);
    if (!std::isfinite(prediction)) return prediction;

    std::size_t i = 0;
    for (auto& [id, learner] : experts_) {
      net_.stats(id).record_error(preds_[i++] - inst.y);
      learner->update(inst.x, inst.y);
    }
    remember(inst);

    const double abs_err = std::fabs(prediction - inst.y);
    if (config_.mode == SfnrMode::period)
      step_period(inst, abs_err);
    else
      step_adwin(inst, abs_err);
    return prediction;
  }

  /// Evolves the network using `window` as training data for the new expert.
  void evolve_network(std::span<const Instance> window, std::size_t index) {
    if (net_.size() >= config_.k_max) {
      const NodeId victim = net_.worst_node();
      remove_node_rewire(net_, victim, rng_);
      experts_.erase(victim);
    }
    auto learner = prototype_->clone_fresh();
    if (window.empty())
      std::clog << "sfnr: evolution at instance " << index << " with an empty training window\n";
    for (const auto& w : window) learner->update(w.x, w.y);
    const NodeId id = next_id_++;
    add_node_preferential(net_, id, rng_, AttachRule::error_adapted, index);
    experts_.emplace(id, std::move(learner));
    update_centrality(net_, config_.metric);
  }

  std::size_t network_size() const override { return net_.size(); }
  std::size_t drift_count() const override { return drift_log_.size(); }
  std::string_view name() const override { return config_.mode == SfnrMode::period ? "sfnr_period" : "sfnr_adwin"; }

  const ExpertNetwork& network() const { return net_; }
  const std::vector<DriftEvent>& drift_log() const { return drift_log_; }
  const SfnrConfig& config() const { return config_; }
  const Adwin& detector() const { return adwin_; }
  const ErrorScale& error_scale() const { return scale_; }
  const Learner& expert(NodeId id) const { return *experts_.at(id); }
  std::size_t buffered() const { return buffer_.size(); }

  void on_evolve(EvolveHook hook) { hook_ = std::move(hook); }

private:
  std::size_t buffer_capacity() const {
    return config_.mode == SfnrMode::period ? config_.period : config_.buffer_size;
  }

  void remember(const Instance& inst) {
    buffer_.push_back(inst);
    while (buffer_.size() > buffer_capacity()) buffer_.pop_front();
  }

  void step_period(const Instance& inst, double abs_err) {
    period_sq_ += abs_err * abs_err;
    if (++period_count_ < config_.period) return;
    const double phi = std::sqrt(period_sq_ / static_cast<double>(period_count_));
    if (phi > config_.threshold) {
      const std::vector<Instance> window(buffer_.begin(), buffer_.end());
      evolve_network(window, inst.index);
      log_event({inst.index, 0, 0});
    }
    buffer_.clear();
    period_sq_ = 0.0;
    period_count_ = 0;
  }

  void step_adwin(const Instance& inst, double abs_err) {
    if (!adwin_.add(scale_.normalize(abs_err))) return;
    const std::size_t take = std::min(adwin_.width(), buffer_.size());
    const std::vector<Instance> window(buffer_.end() - static_cast<std::ptrdiff_t>(take), buffer_.end());
    evolve_network(window, inst.index);
    log_event({inst.index, adwin_.last_width_before(), adwin_.last_width_after()});
  }

  void log_event(const DriftEvent& ev) {
    drift_log_.push_back(ev);
    if (hook_) hook_(*this, ev);
  }

  SfnrConfig config_;
  std::unique_ptr<Learner> prototype_;
  ExpertNetwork net_;
  std::map<NodeId, std::unique_ptr<Learner>> experts_;
  Adwin adwin_;
  ErrorScale scale_;
  Rng rng_;
  NodeId next_id_ = 0;
  std::deque<Instance> buffer_;
  double period_sq_ = 0.0;
  std::size_t period_count_ = 0;
  std::vector<DriftEvent> drift_log_;
  EvolveHook hook_;
  std::vector<double> zetas_, preds_;
};

// ---------------------------------------------------------------------------
// AddExp (continuous), weakest-first pruning
// ---------------------------------------------------------------------------

struct AddExpConfig {
  double beta = 0.5;
  double gamma = 0.1;
  double tau = 0.05;
  std::size_t max_experts = 10;
  std::optional<double> error_range;
  std::size_t warmup = 500;

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("addexp: beta must be in (0,1)");
    if (!(gamma > 0.0)) throw std::invalid_argument("addexp: gamma must be > 0");
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("addexp: tau must be in [0,1]");
    if (max_experts < 1) throw std::invalid_argument("addexp: max experts must be >= 1");
  }
};

class AddExp final : public OnlineModel {
public:
  struct Expert {
    std::unique_ptr<Learner> learner;
    double weight;
  };

  AddExp(AddExpConfig config, std::unique_ptr<Learner> prototype)
      : config_(config),
        prototype_(std::move(prototype)),
        scale_(config_.error_range ? ErrorScale::fixed(*config_.error_range) : ErrorScale::running_max(config_.warmup)) {
    config_.validate();
    if (!prototype_) throw std::invalid_argument("addexp: null prototype learner");
    experts_.push_back({prototype_->clone_fresh(), 1.0});
  }

  double process(const Instance& inst) override {
    preds_.resize(experts_.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < experts_.size(); ++i) {
      preds_[i] = experts_[i].learner->predict(inst.x);
      num += experts_[i].weight * preds_[i];
      den += experts_[i].weight;
    }
    const double prediction = num / den;
    if (!std::isfinite(prediction)) return prediction;

    const double ensemble_loss = scale_.normalize(prediction - inst.y);
    const double norm = std::max(scale_.value(), 1e-12);
    for (std::size_t i = 0; i < experts_.size(); ++i) {
      const double xi = std::clamp(std::fabs(preds_[i] - inst.y) / norm, 0.0, 1.0);
      experts_[i].weight *= std::pow(config_.beta, xi);
    }
    if (ensemble_loss > config_.tau) {
      if (experts_.size() >= config_.max_experts) {
        const auto weakest = std::min_element(experts_.begin(), experts_.end(),
                                              [](const Expert& a, const Expert& b) { return a.weight < b.weight; });
        experts_.erase(weakest);
      }
      double total = 0.0;
      for (const auto& e : experts_) total += e.weight;
      if (experts_.empty()) total = 1.0;
      experts_.push_back({prototype_->clone_fresh(), config_.gamma * total});
      ++additions_;
    }
    rescale();
    for (auto& e : experts_) e.learner->update(inst.x, inst.y);
    return prediction;
  }

  std::size_t network_size() const override { return experts_.size(); }
  std::size_t drift_count() const override { return additions_; }
  std::string_view name() const override { return "addexp"; }

  const std::vector<Expert>& experts() const { return experts_; }
  const AddExpConfig& config() const { return config_; }

private:
  // Weights only matter relative to each other; rescale before underflow and
  // keep every weight at least the smallest normal double.
  void rescale() {
    double top = 0.0;
    for (const auto& e : experts_) top = std::max(top, e.weight);
    if (top < kRescaleBelow)
      for (auto& e : experts_) e.weight /= top;
    for (auto& e : experts_) e.weight = std::max(e.weight, std::numeric_limits<double>::min());
  }

  static constexpr double kRescaleBelow = 1e-100;

  AddExpConfig config_;
  std::unique_ptr<Learner> prototype_;
  ErrorScale scale_;
  std::vector<Expert> experts_;
  std::vector<double> preds_;
  std::size_t additions_ = 0;
};

}  // namespace sfnr
