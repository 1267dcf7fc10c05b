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
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sfnr/expert_graph.hpp"

namespace sfnr {

enum class CentralityMetric { degree, betweenness, closeness, eigenvector, pagerank };

inline std::string_view to_string(CentralityMetric m) {
  switch (m) {
    case CentralityMetric::degree: return "degree";
    case CentralityMetric::betweenness: return "betweenness";
    case CentralityMetric::closeness: return "closeness";
    case CentralityMetric::eigenvector: return "eigenvector";
    case CentralityMetric::pagerank: return "pagerank";
  }
  return "?";
}

inline CentralityMetric parse_centrality_metric(std::string_view s) {
  for (auto m : {CentralityMetric::degree, CentralityMetric::betweenness, CentralityMetric::closeness,
                 CentralityMetric::eigenvector, CentralityMetric::pagerank})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown centrality metric '" + std::string(s) + "'");
}

namespace centrality_detail {

// Dense relabelling 0..n-1 in ascending id order.
struct IndexedGraph {
  std::vector<NodeId> ids;
  std::vector<std::vector<std::size_t>> adj;
};

inline IndexedGraph index_graph(const ExpertNetwork& net) {
  IndexedGraph g;
  g.ids = net.ids();
  std::unordered_map<NodeId, std::size_t> pos;
  for (std::size_t i = 0; i < g.ids.size(); ++i) pos.emplace(g.ids[i], i);
  g.adj.resize(g.ids.size());
  for (std::size_t i = 0; i < g.ids.size(); ++i)
    for (NodeId v : net.neighbors(g.ids[i])) g.adj[i].push_back(pos.at(v));
  return g;
}

inline std::vector<std::size_t> bfs_distances(const IndexedGraph& g, std::size_t src) {
  constexpr auto kUnreached = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(g.ids.size(), kUnreached);
  std::queue<std::size_t> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : g.adj[u])
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  return dist;
}

inline std::vector<double> closeness(const IndexedGraph& g) {
  const std::size_t n = g.ids.size();
  std::vector<double> out(n, 1.0);
  if (n == 1) return out;
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t total = 0;
    for (auto d : bfs_distances(g, v)) total += d;
    out[v] = static_cast<double>(n - 1) / static_cast<double>(total);
  }
  return out;
}

// Brandes (2001) accumulation for unweighted graphs.
inline std::vector<double> betweenness(const IndexedGraph& g) {
  const std::size_t n = g.ids.size();
  if (n == 1) return {1.0};
  std::vector<double> cb(n, 0.0);
  if (n < 3) return cb;
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s) {
    for (auto& p : preds) p.clear();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1L);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::queue<std::size_t> q;
    q.push(s);
    while (!q.empty()) {
      const auto v = q.front();
      q.pop();
      order.push_back(v);
      for (auto w : g.adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto w = *it;
      for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) cb[w] += delta[w];
    }
  }
  // Each unordered pair was counted from both endpoints.
  const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  for (auto& c : cb) c *= scale;
  return cb;
}

// Power iteration on A + I: same principal eigenvector as A, but the shift
// removes the ±λ oscillation of bipartite graphs (paths, stars).
inline std::vector<double> eigenvector(const IndexedGraph& g, double tol = 1e-10, std::size_t max_iter = 1000) {
  const std::size_t n = g.ids.size();
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), next(n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double norm = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      double acc = x[v];
      for (auto u : g.adj[v]) acc += x[u];
      next[v] = acc;
      norm += acc * acc;
    }
    norm = std::sqrt(norm);
    double diff = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] /= norm;
      diff = std::max(diff, std::fabs(next[v] - x[v]));
    }
    x.swap(next);
    if (diff < tol) break;
  }
  return x;
}

inline std::vector<double> pagerank(const IndexedGraph& g, double damping = 0.85, double tol = 1e-10,
                                    std::size_t max_iter = 1000) {
  const std::size_t n = g.ids.size();
  if (n == 1) return {1.0};
  const double teleport = (1.0 - damping) / static_cast<double>(n);
  std::vector<double> x(n, 1.0 / static_cast<double>(n)), next(n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::fill(next.begin(), next.end(), teleport);
    for (std::size_t u = 0; u < n; ++u) {
      const double share = damping * x[u] / static_cast<double>(g.adj[u].size());
      for (auto v : g.adj[u]) next[v] += share;
    }
    double diff = 0.0;
    for (std::size_t v = 0; v < n; ++v) diff += std::fabs(next[v] - x[v]);
    x.swap(next);
    if (diff < tol) break;
  }
  return x;
}

}  // namespace centrality_detail

/// Centrality of every node of a connected network.
///
/// degree: neighbour count. closeness: (n−1)/Σ dist. betweenness: Brandes,
/// normalized by (n−1)(n−2)/2 (zero for n = 2). eigenvector: unit-length
/// principal eigenvector, all entries positive. pagerank: damping 0.85.
/// A single node scores 1.0 under every metric.
inline std::map<NodeId, double> centrality(const ExpertNetwork& net, CentralityMetric metric) {
  using namespace centrality_detail;
  if (net.empty()) throw std::invalid_argument("centrality: empty network");
  if (!is_connected(net)) throw std::logic_error("centrality: network is disconnected");
  const auto g = index_graph(net);
  std::vector<double> values;
  switch (metric) {
    case CentralityMetric::degree:
      values.resize(g.ids.size());
      for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(g.adj[i].size());
      if (values.size() == 1) values[0] = 1.0;
      break;
    case CentralityMetric::betweenness: values = betweenness(g); break;
    case CentralityMetric::closeness: values = closeness(g); break;
    case CentralityMetric::eigenvector: values = eigenvector(g); break;
    case CentralityMetric::pagerank: values = pagerank(g); break;
  }
  std::map<NodeId, double> out;
  for (std::size_t i = 0; i < g.ids.size(); ++i) out.emplace(g.ids[i], values[i]);
  return out;
}

/// Stores the metric into every node's zeta.
inline void update_centrality(ExpertNetwork& net, CentralityMetric metric) {
  for (const auto& [id, value] : centrality(net, metric)) net.stats(id).zeta = value;
}

}  // namespace sfnr
