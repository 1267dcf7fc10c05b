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
#include <sstream>

#include "sfnr/expert_graph.hpp"

namespace sfnr {
namespace {

TEST(NodeRmse, Examples) {
  // outputs {1,2} against expected {1,4}
  EXPECT_NEAR(node_rmse(std::vector<double>{1.0 - 1.0, 2.0 - 4.0}), 1.4142135623730951, 1e-15);
  EXPECT_EQ(node_rmse(std::vector<double>{0.0, 0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(node_rmse(std::vector<double>{-0.37}), 0.37);
  EXPECT_EQ(node_rmse(std::vector<double>{}), 0.0);
}

TEST(NodeStats, PhiTracksWindow) {
  NodeStats s(50);
  EXPECT_EQ(s.phi(), 0.0);
  Rng rng(4);
  for (int i = 0; i < 5000; ++i) {
    s.record_error(rng.uniform(-3.0, 3.0) * (1 + i % 7));
    const std::vector<double> w(s.errors().begin(), s.errors().end());
    ASSERT_NEAR(s.phi(), node_rmse(w), 1e-9);
  }
  EXPECT_EQ(s.errors().size(), 50u);
}

TEST(AttachProbabilities, WorkedExample) {
  const auto p = attach_probabilities(std::vector<double>{0.1, 0.2, 0.3});
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], 0.375, 1e-12);
  EXPECT_NEAR(p[1], 0.25, 1e-12);
  EXPECT_NEAR(p[2], 0.375, 1e-12);
}

TEST(AttachProbabilities, DegenerateCasesAreUniform) {
  for (const auto& phis : {std::vector<double>{0.4, 0.4, 0.4, 0.4}, std::vector<double>{0.0, 0.0}}) {
    for (double p : attach_probabilities(phis)) EXPECT_DOUBLE_EQ(p, 1.0 / phis.size());
  }
  EXPECT_EQ(attach_probabilities(std::vector<double>{0.7}), std::vector<double>{1.0});
  EXPECT_THROW(attach_probabilities(std::vector<double>{0.1, -0.1}), std::invalid_argument);
  EXPECT_THROW(attach_probabilities(std::vector<double>{}), std::invalid_argument);
}

TEST(AttachProbabilities, AlwaysADistribution) {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> phis(1 + rng.uniform_index(12));
    for (auto& p : phis) p = rng.bernoulli(0.2) ? 0.0 : rng.uniform(0.0, 5.0);
    const auto probs = attach_probabilities(phis);
    double sum = 0.0;
    for (double q : probs) {
      EXPECT_GE(q, 0.0);
      sum += q;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(DegreeAttachProbabilities, Examples) {
  const auto p = degree_attach_probabilities(std::vector<std::size_t>{1, 1, 2});
  EXPECT_DOUBLE_EQ(p[0], 0.25);
  EXPECT_DOUBLE_EQ(p[1], 0.25);
  EXPECT_DOUBLE_EQ(p[2], 0.5);
  for (double q : degree_attach_probabilities(std::vector<std::size_t>{3, 3, 3})) EXPECT_DOUBLE_EQ(q, 1.0 / 3);
  EXPECT_EQ(degree_attach_probabilities(std::vector<std::size_t>{0, 2, 2})[0], 0.0);
  for (double q : degree_attach_probabilities(std::vector<std::size_t>{0, 0})) EXPECT_DOUBLE_EQ(q, 0.5);
}

TEST(AddNodePreferential, SeedThenClampedEdges) {
  ExpertNetwork net(10, 2);
  Rng rng(1);
  add_node_preferential(net, 0, rng);
  EXPECT_EQ(net.size(), 1u);
  EXPECT_EQ(net.degree(0), 0u);
  add_node_preferential(net, 1, rng);
  EXPECT_EQ(net.edge_count(), 1u);
  EXPECT_TRUE(net.has_edge(0, 1));
  add_node_preferential(net, 2, rng);
  EXPECT_EQ(net.degree(2), 2u);
  EXPECT_THROW(add_node_preferential(net, 2, rng), std::invalid_argument);
  EXPECT_THROW(net.add_edge(1, 1), std::invalid_argument);
}

TEST(AddNodePreferential, FirstPickFollowsAttachProbabilities) {
  ExpertNetwork base(10, 1);
  const double phis[] = {0.1, 0.2, 0.3};
  for (NodeId id = 0; id < 3; ++id) {
    base.insert_node(id);
    base.stats(id).record_error(phis[id]);
  }
  base.add_edge(0, 1);
  base.add_edge(1, 2);
  Rng rng(2024);
  std::size_t counts[3] = {0, 0, 0};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    ExpertNetwork net = base;
    add_node_preferential(net, 99, rng);
    ASSERT_EQ(net.degree(99), 1u);
    ++counts[*net.neighbors(99).begin()];
  }
  EXPECT_NEAR(counts[0] / double(n), 0.375, 0.01);
  EXPECT_NEAR(counts[1] / double(n), 0.25, 0.01);
  EXPECT_NEAR(counts[2] / double(n), 0.375, 0.01);
}

TEST(RemoveNodeRewire, LeafNeedsNoRewiring) {
  ExpertNetwork net;
  for (NodeId id = 0; id < 3; ++id) net.insert_node(id);
  net.add_edge(0, 1);
  net.add_edge(1, 2);
  Rng rng(0);
  EXPECT_EQ(remove_node_rewire(net, 2, rng), 0u);
  EXPECT_EQ(net.size(), 2u);
  EXPECT_TRUE(is_connected(net));
}

TEST(RemoveNodeRewire, PathCenter) {
  ExpertNetwork net;
  for (NodeId id = 0; id < 3; ++id) net.insert_node(id);
  net.add_edge(0, 1);
  net.add_edge(1, 2);
  Rng rng(0);
  EXPECT_EQ(remove_node_rewire(net, 1, rng), 1u);
  EXPECT_EQ(net.edge_count(), 1u);
  EXPECT_TRUE(net.has_edge(0, 2));
}

TEST(RemoveNodeRewire, StarHub) {
  ExpertNetwork net;
  for (NodeId id = 0; id < 5; ++id) net.insert_node(id);
  for (NodeId id = 1; id < 5; ++id) net.add_edge(0, id);
  Rng rng(0);
  EXPECT_EQ(remove_node_rewire(net, 0, rng), 3u);
  EXPECT_EQ(net.edge_count(), 3u);
  EXPECT_TRUE(is_connected(net));
  // Node 1 is the tie-broken "largest" singleton and receives every edge.
  EXPECT_EQ(net.degree(1), 3u);
}

TEST(RemoveNodeRewire, Errors) {
  ExpertNetwork net;
  net.insert_node(0);
  Rng rng(0);
  EXPECT_THROW(remove_node_rewire(net, 0, rng), std::logic_error);
  EXPECT_THROW(remove_node_rewire(net, 5, rng), std::invalid_argument);
}

TEST(Connectivity, BasicCases) {
  ExpertNetwork net;
  EXPECT_TRUE(is_connected(net));
  net.insert_node(0);
  EXPECT_TRUE(is_connected(net));
  net.insert_node(1);
  EXPECT_FALSE(is_connected(net));
}

TEST(Connectivity, RandomChurn) {
  Rng rng(77);
  for (int seq = 0; seq < 2000; ++seq) {
    ExpertNetwork net(10, 1 + rng.uniform_index(3));
    NodeId next = 0;
    for (int op = 0; op < 40; ++op) {
      const bool add = net.size() < 2 || (net.size() < net.k_max() && rng.bernoulli(0.6));
      if (add) {
        add_node_preferential(net, next, rng);
        for (int e = 0; e < 3; ++e) net.stats(next).record_error(rng.uniform(0.0, 2.0));
        ++next;
      } else {
        const auto ids = net.ids();
        const NodeId victim = rng.bernoulli(0.5) ? net.worst_node() : ids[rng.uniform_index(ids.size())];
        remove_node_rewire(net, victim, rng);
      }
      ASSERT_TRUE(is_connected(net));
      ASSERT_GE(net.size(), 1u);
      ASSERT_LE(net.size(), net.k_max());
    }
  }
}

TEST(ScaleFree, DegreeGrowthProducesHubs) {
  int hubby = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ExpertNetwork net(1000, 2);
    Rng rng(seed);
    for (NodeId id = 0; id < 500; ++id) add_node_preferential(net, id, rng, AttachRule::degree);
    std::vector<std::size_t> deg;
    for (NodeId id : net.ids()) deg.push_back(net.degree(id));
    std::sort(deg.begin(), deg.end());
    const double median = (deg[249] + deg[250]) / 2.0;
    hubby += deg.back() >= 5.0 * median;
  }
  EXPECT_GE(hubby, 18);
}

TEST(ExpertNetwork, WorstNodeTieBreaksLowId) {
  ExpertNetwork net;
  for (NodeId id : {4u, 2u, 9u}) net.insert_node(id);
  net.stats(9).record_error(0.9);
  net.stats(4).record_error(0.1);
  EXPECT_EQ(net.worst_node(), 9u);
  net.stats(2).record_error(0.9);
  EXPECT_EQ(net.worst_node(), 2u);
}

TEST(ExpertNetwork, DebugDumps) {
  ExpertNetwork net;
  for (NodeId id = 0; id < 3; ++id) net.insert_node(id);
  net.add_edge(0, 1);
  net.add_edge(2, 1);
  std::ostringstream edges, nodes;
  write_edge_list(net, edges);
  write_node_table(net, nodes);
  EXPECT_EQ(edges.str(), "0 1\n1 2\n");
  EXPECT_EQ(nodes.str(), "id,phi,zeta,degree\n0,0,0,1\n1,0,0,2\n2,0,0,1\n");
}

}  // namespace
}  // namespace sfnr
