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
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "sfnr/random.hpp"

namespace sfnr {

using NodeId = std::uint64_t;

/// RMSE over a list of absolute deviations |o_l − e_l|. Empty → 0.
inline double node_rmse(std::span<const double> abs_errors) {
  if (abs_errors.empty()) return 0.0;
  double sq = 0.0;
  for (double e : abs_errors) sq += e * e;
  return std::sqrt(sq / static_cast<double>(abs_errors.size()));
}

/// Per-expert bookkeeping: recent errors, RMSE (phi) and centrality (zeta).
class NodeStats {
public:
  explicit NodeStats(std::size_t window = 1000, std::size_t born_at = 0) : window_(window), born_at_(born_at) {
    if (window_ == 0) throw std::invalid_argument("error window must be >= 1");
  }

  void record_error(double abs_error) {
    const double e = std::fabs(abs_error);
    errors_.push_back(e);
    sum_sq_ += e * e;
    if (errors_.size() > window_) {
      const double old = errors_.front();
      errors_.pop_front();
      sum_sq_ -= old * old;
      // Resync once per full window so cancellation error cannot accumulate.
      if (++evictions_ % window_ == 0) {
        sum_sq_ = 0.0;
        for (double x : errors_) sum_sq_ += x * x;
      }
    }
  }

  double phi() const {
    if (errors_.empty()) return 0.0;
    return std::sqrt(std::max(0.0, sum_sq_) / static_cast<double>(errors_.size()));
  }

  const std::deque<double>& errors() const { return errors_; }
  std::size_t born_at() const { return born_at_; }

  double zeta = 0.0;

private:
  std::size_t window_;
  std::size_t born_at_;
  std::deque<double> errors_;
  double sum_sq_ = 0.0;
  std::size_t evictions_ = 0;
};

/// Attachment distribution from node RMSEs:
///   raw_k = (1 / Σ_j φ_j) · Σ_i |φ_i − φ_k|, normalized to sum to 1.
/// Uniform when Σφ = 0 or every raw value is 0.
inline std::vector<double> attach_probabilities(std::span<const double> phis) {
  if (phis.empty()) throw std::invalid_argument("attach_probabilities: no nodes");
  double total = 0.0;
  for (double p : phis) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("attach_probabilities: negative or non-finite phi");
    total += p;
  }
  const std::size_t n = phis.size();
  std::vector<double> out(n, 1.0 / static_cast<double>(n));
  if (!(total > 0.0)) return out;
  double raw_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double dev = 0.0;
    for (double p : phis) dev += std::fabs(p - phis[k]);
    out[k] = dev / total;
    raw_sum += out[k];
  }
  if (!(raw_sum > 0.0)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
    return out;
  }
  for (auto& v : out) v /= raw_sum;
  return out;
}

/// Classic degree-proportional attachment Π(r) = d_r / Σ_j d_j.
inline std::vector<double> degree_attach_probabilities(std::span<const std::size_t> degrees) {
  if (degrees.empty()) throw std::invalid_argument("degree_attach_probabilities: no nodes");
  std::size_t total = 0;
  for (auto d : degrees) total += d;
  const std::size_t n = degrees.size();
  std::vector<double> out(n, 1.0 / static_cast<double>(n));
  if (total == 0) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(degrees[i]) / static_cast<double>(total);
  return out;
}

enum class AttachRule {
  error_adapted,  // attach_probabilities over node RMSEs
  degree,         // degree_attach_probabilities
};

/// Undirected simple graph of experts. Node ids iterate in ascending order,
/// which is the tie-break order used everywhere.
class ExpertNetwork {
public:
  explicit ExpertNetwork(std::size_t k_max = 10, std::size_t edges_per_node = 2, std::size_t error_window = 1000)
      : k_max_(k_max), m_a_(edges_per_node), error_window_(error_window) {
    if (k_max_ == 0) throw std::invalid_argument("k_max must be >= 1");
    if (m_a_ == 0) throw std::invalid_argument("edges per node must be >= 1");
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  bool contains(NodeId id) const { return nodes_.count(id) != 0; }
  std::size_t k_max() const { return k_max_; }
  std::size_t edges_per_node() const { return m_a_; }

  std::vector<NodeId> ids() const {
    std::vector<NodeId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, _] : nodes_) out.push_back(id);
    return out;
  }

  const std::set<NodeId>& neighbors(NodeId id) const { return node(id).adj; }
  std::size_t degree(NodeId id) const { return node(id).adj.size(); }
  bool has_edge(NodeId u, NodeId v) const { return contains(u) && node(u).adj.count(v) != 0; }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& [_, n] : nodes_) twice += n.adj.size();
    return twice / 2;
  }

  NodeStats& stats(NodeId id) { return node(id).stats; }
  const NodeStats& stats(NodeId id) const { return node(id).stats; }

  /// Adds an isolated node. Low level: callers restore connectivity.
  void insert_node(NodeId id, std::size_t born_at = 0) {
    if (contains(id)) throw std::invalid_argument("node " + std::to_string(id) + " already in network");
    nodes_.emplace(id, Node{NodeStats(error_window_, born_at), {}});
  }

  void add_edge(NodeId u, NodeId v) {
    if (u == v) throw std::invalid_argument("self-loop rejected");
    node(u).adj.insert(v);
    node(v).adj.insert(u);
  }

  /// Drops a node and its incident edges. Low level: no rewiring.
  void erase_node(NodeId id) {
    for (NodeId v : node(id).adj) nodes_.at(v).adj.erase(id);
    nodes_.erase(id);
  }

  /// Node with the highest phi; lowest id wins ties.
  NodeId worst_node() const {
    if (nodes_.empty()) throw std::logic_error("worst_node: empty network");
    NodeId best = nodes_.begin()->first;
    double worst_phi = -1.0;
    for (const auto& [id, n] : nodes_) {
      const double phi = n.stats.phi();
      if (phi > worst_phi) {
        worst_phi = phi;
        best = id;
      }
    }
    return best;
  }

private:
  struct Node {
    NodeStats stats;
    std::set<NodeId> adj;
  };

  Node& node(NodeId id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::out_of_range("unknown node " + std::to_string(id));
    return it->second;
  }
  const Node& node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::out_of_range("unknown node " + std::to_string(id));
    return it->second;
  }

  std::size_t k_max_;
  std::size_t m_a_;
  std::size_t error_window_;
  std::map<NodeId, Node> nodes_;
};

/// Connected components in ascending order of their smallest id; each
/// component is sorted ascending.
inline std::vector<std::vector<NodeId>> connected_components(const ExpertNetwork& net) {
  std::vector<std::vector<NodeId>> comps;
  std::set<NodeId> seen;
  for (NodeId start : net.ids()) {
    if (seen.count(start)) continue;
    std::vector<NodeId> comp;
    std::queue<NodeId> frontier;
    frontier.push(start);
    seen.insert(start);
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop();
      comp.push_back(u);
      for (NodeId v : net.neighbors(u))
        if (seen.insert(v).second) frontier.push(v);
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

inline bool is_connected(const ExpertNetwork& net) { return connected_components(net).size() <= 1; }

/// Attachment distribution over `candidates` under the given rule.
inline std::vector<double> attachment_weights(const ExpertNetwork& net, std::span<const NodeId> candidates,
                                              AttachRule rule) {
  if (rule == AttachRule::degree) {
    std::vector<std::size_t> deg;
    deg.reserve(candidates.size());
    for (NodeId id : candidates) deg.push_back(net.degree(id));
    return degree_attach_probabilities(deg);
  }
  std::vector<double> phis;
  phis.reserve(candidates.size());
  for (NodeId id : candidates) phis.push_back(net.stats(id).phi());
  return attach_probabilities(phis);
}

/// Draws min(count, |candidates|) distinct candidates. Each draw is weighted
/// by the attachment distribution restricted to the not-yet-picked ones.
inline std::vector<NodeId> sample_attachment_targets(const ExpertNetwork& net, std::span<const NodeId> candidates,
                                                     std::size_t count, Rng& rng,
                                                     AttachRule rule = AttachRule::error_adapted) {
  std::vector<NodeId> picked;
  if (candidates.empty()) return picked;
  std::vector<double> weights = attachment_weights(net, candidates, rule);
  count = std::min(count, candidates.size());
  std::vector<bool> taken(candidates.size(), false);
  while (picked.size() < count) {
    double remaining = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (!taken[i]) remaining += weights[i];
    if (!(remaining > 0.0))
      for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = taken[i] ? 0.0 : 1.0;
    const std::size_t i = rng.weighted_index(weights);
    taken[i] = true;
    weights[i] = 0.0;
    picked.push_back(candidates[i]);
  }
  return picked;
}

/// Adds `id` and links it to min(m_a, |nodes|) existing nodes picked by
/// preferential attachment. The first node becomes an isolated seed.
inline void add_node_preferential(ExpertNetwork& net, NodeId id, Rng& rng,
                                  AttachRule rule = AttachRule::error_adapted, std::size_t born_at = 0) {
  if (net.contains(id)) throw std::invalid_argument("node " + std::to_string(id) + " already in network");
  const auto existing = net.ids();
  const auto targets = sample_attachment_targets(net, existing, net.edges_per_node(), rng, rule);
  net.insert_node(id, born_at);
  for (NodeId t : targets) net.add_edge(id, t);
  if (!is_connected(net)) throw std::logic_error("network disconnected after node addition");
}

/// Removes `victim`, then reconnects every component other than the largest
/// with one edge: a uniformly chosen member links to a node of the largest
/// component drawn from the attachment distribution over that component.
/// Returns the number of edges added.
inline std::size_t remove_node_rewire(ExpertNetwork& net, NodeId victim, Rng& rng,
                                      AttachRule rule = AttachRule::error_adapted) {
  if (!net.contains(victim)) throw std::invalid_argument("node " + std::to_string(victim) + " not in network");
  if (net.size() < 2) throw std::logic_error("cannot remove the last node of the network");
  net.erase_node(victim);

  auto comps = connected_components(net);
  std::size_t added = 0;
  if (comps.size() > 1) {
    // Components are ordered by smallest id, so max_element keeps the
    // lowest-id component among equal sizes.
    const auto largest = std::max_element(comps.begin(), comps.end(),
                                          [](const auto& a, const auto& b) { return a.size() < b.size(); });
    const std::vector<NodeId> anchor = *largest;
    const auto weights = attachment_weights(net, anchor, rule);
    for (auto it = comps.begin(); it != comps.end(); ++it) {
      if (it == largest) continue;
      const NodeId from = (*it)[rng.uniform_index(it->size())];
      const NodeId to = anchor[rng.weighted_index(weights)];
      net.add_edge(from, to);
      ++added;
    }
  }
  if (!is_connected(net)) throw std::logic_error("network disconnected after rewiring");
  return added;
}

/// Debug dump: one "u v" pair per line, u < v.
inline void write_edge_list(const ExpertNetwork& net, std::ostream& out) {
  for (NodeId u : net.ids())
    for (NodeId v : net.neighbors(u))
      if (u < v) out << u << ' ' << v << '\n';
}

/// Debug dump: "id,phi,zeta,degree" table.
inline void write_node_table(const ExpertNetwork& net, std::ostream& out) {
  out << "id,phi,zeta,degree\n";
  for (NodeId id : net.ids())
    out << id << ',' << net.stats(id).phi() << ',' << net.stats(id).zeta << ',' << net.degree(id) << '\n';
}

}  // namespace sfnr
