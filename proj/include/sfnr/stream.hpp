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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sfnr/random.hpp"

namespace sfnr {

/// One stream element: feature vector, real target and its position t.
struct Instance {
  std::vector<double> x;
  double y = 0.0;
  std::size_t index = 0;
};

/// Pull-based source of instances. Returns nullopt once exhausted.
class InstanceStream {
public:
  virtual ~InstanceStream() = default;
  virtual std::optional<Instance> next() = 0;
};

/// Replays an in-memory dataset, renumbering indices from 0.
class VectorStream final : public InstanceStream {
public:
  explicit VectorStream(std::vector<Instance> data) : data_(std::move(data)) {}

  std::optional<Instance> next() override {
    if (pos_ >= data_.size()) return std::nullopt;
    Instance out = data_[pos_];
    out.index = pos_++;
    return out;
  }

private:
  std::vector<Instance> data_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Rotating hyperplane concepts
// ---------------------------------------------------------------------------

/// A random hyperplane with unit normal `w` through anchor `c`.
struct HyperplaneConcept {
  std::vector<double> w;
  std::vector<double> c;
  std::size_t d = 0;
  std::uint64_t seed = 0;
};

/// How the target is derived from the point-to-plane distance.
enum class TargetKind {
  unsigned_distance,  // |w·(x−c)|
  signed_distance,    // w·(x−c); realizable by a linear model
};

inline HyperplaneConcept make_hyperplane_concept(std::uint64_t seed, std::size_t d) {
  if (d < 2) throw std::invalid_argument("hyperplane dimension must be >= 2");
  HyperplaneConcept plane{};
  plane.d = d;
  plane.seed = seed;
  plane.c.assign(d, 0.5);
  plane.w.assign(d, 0.0);
  Rng rng(seed);
  double norm = 0.0;
  do {
    double sq = 0.0;
    for (auto& wi : plane.w) {
      wi = rng.uniform(-1.0, 1.0);
      sq += wi * wi;
    }
    norm = std::sqrt(sq);
  } while (norm < 1e-9);
  for (auto& wi : plane.w) wi /= norm;
  return plane;
}

inline double signed_plane_distance(const HyperplaneConcept& plane, std::span<const double> x) {
  if (x.size() != plane.d) throw std::invalid_argument("hyperplane_target: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < plane.d; ++i) dot += plane.w[i] * (x[i] - plane.c[i]);
  return dot;
}

/// Unsigned Euclidean distance from x to the plane.
inline double hyperplane_target(const HyperplaneConcept& plane, std::span<const double> x) {
  return std::fabs(signed_plane_distance(plane, x));
}

inline double hyperplane_target(const HyperplaneConcept& plane, std::span<const double> x,
                                TargetKind kind) {
  return kind == TargetKind::signed_distance ? signed_plane_distance(plane, x)
                                             : hyperplane_target(plane, x);
}

/// Probability of drawing from the post-drift concept at time t for a drift
/// centred at t0 with transition width W (slope 4/W).
inline double sigmoid_mix_probability(double t, double t0, double width) {
  if (!(width >= 1.0)) throw std::invalid_argument("drift width must be >= 1");
  return 1.0 / (1.0 + std::exp(-4.0 * (t - t0) / width));
}

// ---------------------------------------------------------------------------
// Drifting stream
// ---------------------------------------------------------------------------

struct DriftStreamSpec {
  std::vector<HyperplaneConcept> concepts;
  std::vector<std::size_t> drift_times;
  std::vector<std::size_t> drift_widths;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  TargetKind target = TargetKind::unsigned_distance;

  std::size_t dimension() const { return concepts.empty() ? 0 : concepts.front().d; }

  void validate() const {
    if (concepts.empty()) throw std::invalid_argument("drift stream needs at least one concept");
    if (drift_times.size() + 1 != concepts.size() || drift_widths.size() + 1 != concepts.size())
      throw std::invalid_argument("drift stream needs |concepts| - 1 drift times and widths");
    for (std::size_t i = 1; i < drift_times.size(); ++i)
      if (drift_times[i] <= drift_times[i - 1])
        throw std::invalid_argument("drift times must be strictly increasing");
    for (auto w : drift_widths)
      if (w < 1) throw std::invalid_argument("drift widths must be >= 1");
    for (const auto& c : concepts)
      if (c.d != concepts.front().d) throw std::invalid_argument("concepts differ in dimension");
  }
};

/// Builds a spec whose concepts are seeded from `seed`.
inline DriftStreamSpec make_drift_stream_spec(std::uint64_t seed, std::size_t d, std::size_t length,
                                              std::vector<std::size_t> drift_times,
                                              std::vector<std::size_t> drift_widths,
                                              TargetKind target = TargetKind::unsigned_distance) {
  DriftStreamSpec spec;
  spec.seed = seed;
  spec.length = length;
  spec.target = target;
  spec.drift_times = std::move(drift_times);
  spec.drift_widths = std::move(drift_widths);
  for (std::size_t k = 0; k <= spec.drift_times.size(); ++k)
    spec.concepts.push_back(make_hyperplane_concept(derive_seed(seed, k + 1), d));
  spec.validate();
  return spec;
}

/// Chains the sigmoid mixers: concept j+1 takes over from concept j when it
/// wins a Bernoulli draw with probability f_j(t). Draws stop at the first loss.
inline std::size_t select_concept(const DriftStreamSpec& spec, std::size_t t, Rng& rng) {
  std::size_t active = 0;
  for (std::size_t j = 0; j < spec.drift_times.size(); ++j) {
    const double p = sigmoid_mix_probability(static_cast<double>(t),
                                             static_cast<double>(spec.drift_times[j]),
                                             static_cast<double>(spec.drift_widths[j]));
    if (!rng.bernoulli(p)) break;
    active = j + 1;
  }
  return active;
}

class DriftStreamGenerator final : public InstanceStream {
public:
  explicit DriftStreamGenerator(DriftStreamSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) {
    spec_.validate();
  }

  std::optional<Instance> next() override {
    if (t_ >= spec_.length) return std::nullopt;
    Instance inst;
    inst.index = t_;
    last_plane = select_concept(spec_, t_, rng_);
    inst.x.resize(spec_.dimension());
    for (auto& xi : inst.x) xi = rng_.uniform01();
    inst.y = hyperplane_target(spec_.concepts[last_plane], inst.x, spec_.target);
    ++t_;
    return inst;
  }

  /// Concept that produced the most recent instance.
  std::size_t last_concept() const { return last_plane; }
  const DriftStreamSpec& spec() const { return spec_; }

private:
  DriftStreamSpec spec_;
  Rng rng_;
  std::size_t t_ = 0;
  std::size_t last_plane = 0;
};

inline std::vector<Instance> generate_drift_stream(const DriftStreamSpec& spec) {
  DriftStreamGenerator gen(spec);
  std::vector<Instance> out;
  out.reserve(spec.length);
  while (auto inst = gen.next()) out.push_back(std::move(*inst));
  return out;
}

}  // namespace sfnr
