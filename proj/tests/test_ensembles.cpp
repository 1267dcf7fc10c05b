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
#include <algorithm>
#include <cmath>
#include <gtest/gtest.h>
#include <memory>
#include <string>

#include "sfnr/ensembles.hpp"

namespace sfnr {
namespace {

TEST(WeightedPrediction, Example) {
  const std::vector<double> z{2, 1, 1}, h{1.0, 2.0, 3.0};
  EXPECT_EQ(weighted_prediction(z, h), 1.75);
}

TEST(WeightedPrediction, ScaleInvariantInZeta) {
  const std::vector<double> h{0.3, -1.2, 4.4, 2.0};
  const std::vector<double> z{0.1, 0.7, 0.05, 0.15};
  const double base = weighted_prediction(z, h);
  for (double c : {1e-6, 0.5, 3.0, 1e6}) {
    std::vector<double> zc(z);
    for (auto& v : zc) v *= c;
    EXPECT_NEAR(weighted_prediction(zc, h), base, 1e-12);
  }
}

TEST(WeightedPrediction, ZeroMassFallsBackToMean) {
  EXPECT_DOUBLE_EQ(weighted_prediction(std::vector<double>{0, 0}, std::vector<double>{1, 3}), 2.0);
  EXPECT_THROW(weighted_prediction(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(weighted_prediction(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(ErrorScale, FixedAndRunningMax) {
  auto f = ErrorScale::fixed(2.0);
  EXPECT_EQ(f.normalize(1.0), 0.5);
  EXPECT_EQ(f.normalize(-5.0), 1.0);
  auto r = ErrorScale::running_max(3);
  EXPECT_EQ(r.normalize(2.0), 1.0);
  EXPECT_EQ(r.normalize(1.0), 0.5);
  EXPECT_EQ(r.normalize(4.0), 1.0);
  EXPECT_TRUE(r.frozen());
  EXPECT_EQ(r.normalize(8.0), 1.0);
  EXPECT_EQ(r.value(), 4.0);
  EXPECT_THROW(ErrorScale::fixed(0.0), std::invalid_argument);
}

std::vector<Instance> line_stream(std::size_t n, std::uint64_t seed, std::size_t switch_at = SIZE_MAX) {
  Rng rng(seed);
  std::vector<Instance> out;
  for (std::size_t t = 0; t < n; ++t) {
    const double x = rng.uniform01();
    const double y = t < switch_at ? 2 * x + 1 : -3 * x + 4;
    out.push_back({{x}, y, t});
  }
  return out;
}

SfnrConfig period_config(std::size_t p, double theta, std::size_t kmax = 10) {
  SfnrConfig c;
  c.mode = SfnrMode::period;
  c.period = p;
  c.threshold = theta;
  c.k_max = kmax;
  c.error_range = 3.0;
  return c;
}

TEST(Sfnr, StartsWithOneNode) {
  Sfnr s(SfnrConfig{}, make_learner("linear"), 1);
  EXPECT_EQ(s.network_size(), 1u);
  EXPECT_EQ(s.network().stats(0).zeta, 1.0);
}

TEST(Sfnr, PeriodModeZeroThresholdGrowsEveryPeriod) {
  Sfnr s(period_config(100, 0.0), make_learner("linear"), 2);
  for (const auto& inst : line_stream(500, 3)) s.process(inst);
  EXPECT_EQ(s.network_size(), 6u);
  EXPECT_EQ(s.drift_count(), 5u);
  EXPECT_TRUE(is_connected(s.network()));
}

TEST(Sfnr, PeriodModeHighThresholdNeverGrows) {
  Sfnr s(period_config(100, 1e9), make_learner("linear"), 2);
  for (const auto& inst : line_stream(1000, 3)) s.process(inst);
  EXPECT_EQ(s.network_size(), 1u);
}

TEST(Sfnr, RespectsKmax) {
  Sfnr s(period_config(10, 0.0, 4), make_learner("linear"), 4);
  const auto data = line_stream(300, 5);
  for (const auto& inst : data) {
    s.process(inst);
    ASSERT_LE(s.network_size(), 4u);
    ASSERT_TRUE(is_connected(s.network()));
  }
  EXPECT_EQ(s.network_size(), 4u);
  EXPECT_EQ(s.drift_count(), 30u);
}

TEST(Sfnr, ZetaMatchesFreshCentrality) {
  for (auto metric : {CentralityMetric::degree, CentralityMetric::closeness, CentralityMetric::betweenness,
                      CentralityMetric::eigenvector, CentralityMetric::pagerank}) {
    auto cfg = period_config(20, 0.0, 6);
    cfg.metric = metric;
    Sfnr s(cfg, make_learner("linear"), 6);
    for (const auto& inst : line_stream(400, 7)) {
      s.process(inst);
      const auto z = centrality(s.network(), metric);
      for (const auto& [id, v] : z) ASSERT_EQ(s.network().stats(id).zeta, v);
    }
  }
}

TEST(Sfnr, PredictionIsNaiveWeightedVote) {
  Sfnr s(period_config(25, 0.0, 5), make_learner("linear"), 8);
  for (const auto& inst : line_stream(300, 9)) {
    double num = 0, den = 0;
    for (NodeId id : s.network().ids()) {
      num += s.network().stats(id).zeta * s.expert(id).predict(inst.x);
      den += s.network().stats(id).zeta;
    }
    const double got = s.process(inst);
    ASSERT_NEAR(got, num / den, 1e-12 * std::max(1.0, std::fabs(got)));
  }
}

TEST(Sfnr, NewExpertIsTrainedOnWindow) {
  Sfnr s(period_config(50, 0.0), make_learner("linear"), 10);
  const auto data = line_stream(50, 11);
  bool fired = false;
  s.on_evolve([&](const Sfnr& model, const DriftEvent& ev) {
    fired = true;
    EXPECT_EQ(ev.index, 49u);
    LinearLearner ref;
    for (const auto& inst : data) ref.update(inst.x, inst.y);
    for (double probe : {0.0, 0.25, 0.9}) {
      const std::vector<double> x{probe};
      EXPECT_EQ(model.expert(1).predict(x), ref.predict(x));
    }
  });
  for (const auto& inst : data) s.process(inst);
  EXPECT_TRUE(fired);
}

TEST(Sfnr, AdwinModeQuietOnStationaryStream) {
  SfnrConfig cfg;
  cfg.error_range = 1.0;
  Sfnr s(cfg, make_learner("mean"), 12);
  Rng rng(13);
  for (std::size_t t = 0; t < 20000; ++t) s.process({{0.0}, rng.uniform01(), t});
  EXPECT_EQ(s.drift_count(), 0u);
  EXPECT_EQ(s.network_size(), 1u);
}

TEST(Sfnr, AdwinModeDetectsAbruptSwap) {
  SfnrConfig cfg;
  cfg.error_range = 3.0;
  cfg.check_interval = 1;
  Sfnr s(cfg, make_learner("linear"), 14);
  std::size_t first_after = SIZE_MAX;
  for (const auto& inst : line_stream(8000, 15, 4000)) {
    s.process(inst);
    for (const auto& ev : s.drift_log())
      if (ev.index >= 4000 && first_after == SIZE_MAX) first_after = ev.index;
  }
  ASSERT_NE(first_after, SIZE_MAX);
  EXPECT_LT(first_after, 6000u);
  EXPECT_GE(s.network_size(), 2u);
  for (const auto& ev : s.drift_log()) EXPECT_LT(ev.width_after, ev.width_before);
}

TEST(Sfnr, RejectsBadConfig) {
  SfnrConfig cfg;
  cfg.k_max = 1;
  EXPECT_THROW(Sfnr(cfg, make_learner("linear"), 1), std::invalid_argument);
  EXPECT_THROW(Sfnr(SfnrConfig{}, nullptr, 1), std::invalid_argument);
}

// Records call order so test-then-train can be checked.
class SpyLearner final : public Learner {
public:
  explicit SpyLearner(std::shared_ptr<std::vector<std::pair<char, std::size_t>>> log) : log_(std::move(log)) {}
  double predict(std::span<const double> x) const override {
    log_->push_back({'p', static_cast<std::size_t>(x[0])});
    return 0.0;
  }
  void update(std::span<const double> x, double) override { log_->push_back({'u', static_cast<std::size_t>(x[0])}); }
  std::unique_ptr<Learner> clone_fresh() const override { return std::make_unique<SpyLearner>(log_); }
  std::string_view name() const override { return "spy"; }

private:
  std::shared_ptr<std::vector<std::pair<char, std::size_t>>> log_;
};

TEST(Sfnr, TestThenTrain) {
  auto log = std::make_shared<std::vector<std::pair<char, std::size_t>>>();
  Sfnr s(period_config(5, 0.0, 4), std::make_unique<SpyLearner>(log), 16);
  const std::size_t n = 60;
  std::vector<std::size_t> last_predict(n, 0), first_update(n, SIZE_MAX);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t before = log->size();
    s.process({{static_cast<double>(t)}, 1.0, t});
    for (std::size_t i = before; i < log->size(); ++i) {
      const auto [kind, idx] = (*log)[i];
      if (idx != t) continue;
      if (kind == 'p') last_predict[t] = i;
      if (kind == 'u') first_update[t] = std::min(first_update[t], i);
    }
    ASSERT_LT(last_predict[t], first_update[t]) << "instance " << t;
  }
}

TEST(AddExp, WeightShrinksByBetaPowLoss) {
  AddExpConfig cfg;
  cfg.error_range = 1.0;
  cfg.tau = 1.0;
  AddExp a(cfg, make_learner("mean"));
  a.process({{0.0}, 1.0, 0});
  ASSERT_EQ(a.experts().size(), 1u);
  EXPECT_EQ(a.experts()[0].weight, 0.5);
}

TEST(AddExp, AddsWithGammaWeightAndPrunesWeakest) {
  AddExpConfig cfg;
  cfg.error_range = 1.0;
  cfg.tau = 0.0;
  cfg.max_experts = 3;
  AddExp a(cfg, make_learner("mean"));
  a.process({{0.0}, 1.0, 0});
  ASSERT_EQ(a.experts().size(), 2u);
  EXPECT_EQ(a.experts()[0].weight, 0.5);
  EXPECT_EQ(a.experts()[1].weight, 0.05);
  Rng rng(17);
  for (std::size_t t = 1; t < 500; ++t) {
    a.process({{0.0}, rng.uniform01(), t});
    ASSERT_LE(a.experts().size(), 3u);
  }
}

TEST(AddExp, WeightsStayPositiveOnLongStreams) {
  AddExpConfig cfg;
  cfg.error_range = 1.0;
  cfg.tau = 1.0;
  AddExp a(cfg, make_learner("mean"));
  for (std::size_t t = 0; t < 1000000; ++t) {
    const double p = a.process({{0.0}, t % 2 ? 1.0 : -1.0, t});
    ASSERT_TRUE(std::isfinite(p));
  }
  for (const auto& e : a.experts()) {
    EXPECT_GT(e.weight, 0.0);
    EXPECT_TRUE(std::isfinite(e.weight));
  }
}

TEST(SingleLearner, TestThenTrain) {
  SingleLearnerModel m(make_learner("mean"));
  EXPECT_EQ(m.process({{}, 4.0, 0}), 0.0);
  EXPECT_EQ(m.process({{}, 2.0, 1}), 4.0);
  EXPECT_EQ(m.process({{}, 0.0, 2}), 3.0);
}

}  // namespace
}  // namespace sfnr
