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
#include <cmath>
#include <gtest/gtest.h>

#include "sfnr/learners.hpp"
#include "sfnr/random.hpp"

namespace sfnr {
namespace {

const std::vector<double> kNoFeatures{};

TEST(Ema, SingleStep) {
  EmaLearner ema(5);
  EXPECT_DOUBLE_EQ(ema.multiplier(), 1.0 / 3.0);
  ema.update(kNoFeatures, 10.0);
  ema.update(kNoFeatures, 13.0);
  EXPECT_EQ(ema.predict(kNoFeatures), 11.0);
}

TEST(Ema, ColdStartAndInit) {
  EmaLearner ema(5);
  EXPECT_EQ(ema.predict(kNoFeatures), 0.0);
  ema.update(kNoFeatures, 42.0);
  EXPECT_EQ(ema.predict(kNoFeatures), 42.0);
}

TEST(Ema, ConstantIsFixedPoint) {
  for (std::size_t w : {1u, 2u, 5u, 30u, 200u}) {
    EmaLearner ema(w);
    for (int i = 0; i < 1000; ++i) {
      ema.update(kNoFeatures, 3.7);
      ASSERT_LT(std::fabs(ema.predict(kNoFeatures) - 3.7), 1e-12);
    }
  }
}

TEST(Ema, IgnoresFeatures) {
  EmaLearner ema(5);
  ema.update(std::vector<double>{1, 2}, 10.0);
  EXPECT_EQ(ema.predict(std::vector<double>{100, -5}), ema.predict(kNoFeatures));
  EXPECT_THROW(EmaLearner(0), std::invalid_argument);
}

TEST(Linear, UntrainedPredictsZero) {
  LinearLearner lin;
  EXPECT_EQ(lin.predict(std::vector<double>{3.0, 4.0}), 0.0);
}

TEST(Linear, LearnsNoiselessLine) {
  LinearLearner lin;
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform01();
    lin.update(std::vector<double>{x}, 2 * x + 1);
  }
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform01();
    EXPECT_LT(std::fabs(lin.predict(std::vector<double>{x}) - (2 * x + 1)), 0.05);
  }
}

TEST(Linear, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(4), x(4);
    for (auto& v : w) v = rng.uniform(-2, 2);
    for (auto& v : x) v = rng.uniform(-2, 2);
    const double b = rng.uniform(-1, 1), y = rng.uniform(-3, 3);
    const auto grad = squared_loss_gradient(w, b, x, y);
    const double h = 1e-6;
    for (std::size_t i = 0; i <= w.size(); ++i) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (i < w.size()) {
        wp[i] += h;
        wm[i] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      const double fd = (squared_loss(wp, bp, x, y) - squared_loss(wm, bm, x, y)) / (2 * h);
      EXPECT_NEAR(grad[i], fd, 1e-6 * std::max(1.0, std::fabs(fd)));
    }
  }
}

TEST(Linear, DimensionFixedByFirstUpdate) {
  LinearLearner lin;
  lin.update(std::vector<double>{1, 2}, 1);
  EXPECT_THROW(lin.update(std::vector<double>{1}, 1), std::invalid_argument);
  EXPECT_THROW(lin.predict(std::vector<double>{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(LinearLearner(0.0), std::invalid_argument);
}

TEST(Linear, StaysBoundedOnLongStreams) {
  LinearLearner lin;
  Rng rng(6);
  std::vector<double> x(3);
  for (int i = 0; i < 1000000; ++i) {
    x = {rng.uniform01() * 1e7, rng.uniform(-1, 1), rng.uniform01() * 50};
    lin.update(x, rng.uniform(-10, 10));
  }
  for (double w : lin.weights()) {
    EXPECT_TRUE(std::isfinite(w));
    EXPECT_LT(std::fabs(w), 100.0);
  }
  EXPECT_TRUE(std::isfinite(lin.bias()));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_GE(lin.variance(i), 0.0);
}

TEST(Mean, Examples) {
  MeanLearner m;
  EXPECT_EQ(m.predict(kNoFeatures), 0.0);
  for (double y : {1.0, 2.0, 3.0}) m.update(kNoFeatures, y);
  EXPECT_EQ(m.predict(kNoFeatures), 2.0);
}

TEST(Mean, CompensatedSumMatchesExact) {
  MeanLearner m;
  Rng rng(9);
  long long exact_units = 0;  // targets are multiples of 2^-20
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const long long units = static_cast<long long>(rng.uniform_index(1u << 24)) + (1LL << 30);
    exact_units += units;
    m.update(kNoFeatures, std::ldexp(static_cast<double>(units), -20) + 0.1);
  }
  const double exact = std::ldexp(static_cast<double>(exact_units) / n, -20) + 0.1;
  EXPECT_NEAR(m.predict(kNoFeatures), exact, 1e-9 * exact);
}

TEST(Learners, CloneFreshReplaysLikeNew) {
  Rng rng(10);
  std::vector<std::pair<std::vector<double>, double>> data;
  for (int i = 0; i < 300; ++i) data.push_back({{rng.uniform01(), rng.uniform01()}, rng.uniform(0, 5)});
  for (const char* kind : {"linear", "ema", "mean"}) {
    auto trained = make_learner(kind);
    for (int i = 0; i < 50; ++i) trained->update(data[i].first, data[i].second);
    auto clone = trained->clone_fresh();
    auto fresh = make_learner(kind);
    for (const auto& [x, y] : data) {
      ASSERT_EQ(clone->predict(x), fresh->predict(x)) << kind;
      clone->update(x, y);
      fresh->update(x, y);
    }
  }
  EXPECT_THROW(make_learner("tree"), std::invalid_argument);
}

TEST(Learners, PredictIsPure) {
  for (const char* kind : {"linear", "ema", "mean"}) {
    auto l = make_learner(kind);
    const std::vector<double> x{0.3, 0.6};
    l->update(x, 2.0);
    l->update(std::vector<double>{0.1, 0.9}, 3.0);
    const double first = l->predict(x);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(l->predict(x), first) << kind;
  }
}

}  // namespace
}  // namespace sfnr
