#pragma once

// Directed acyclic communication graph and the geometric convex combination
// that turns a multi-parent node into a single virtual parent.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rtiform/lie.hpp"
#include "rtiform/uav.hpp"

namespace rti {

using NodeId = std::size_t;

struct Edge {
  NodeId parent;
  NodeId child;
};

/// Node 0 is the leader. Parent lists are kept in ascending node order, which
/// pins the left-to-right fold of the convex combination.
class SwarmTopology {
 public:
  SwarmTopology() = default;

  /// `weights[i]` may be empty, in which case the running-mean default
  /// lambda_j = 1/(j+1) is used.
  SwarmTopology(std::size_t node_count, std::span<const Edge> edges,
                std::vector<std::vector<double>> weights = {})
      : parents_(node_count), weights_(node_count) {
    if (node_count == 0) {
      throw Error(ErrorCode::kInvalidArgument, "topology needs a leader node");
    }
    for (const Edge& e : edges) {
      if (e.parent >= node_count || e.child >= node_count) {
        throw Error(ErrorCode::kInvalidArgument,
                    "edge " + std::to_string(e.parent) + "->" +
                        std::to_string(e.child) + " references unknown node");
      }
      if (e.parent == e.child) {
        throw Error(ErrorCode::kCycleDetected,
                    "self-loop at node " + std::to_string(e.child));
      }
      auto& list = parents_[e.child];
      if (std::find(list.begin(), list.end(), e.parent) == list.end()) {
        list.push_back(e.parent);
      }
    }
    if (!parents_[0].empty()) {
      throw Error(ErrorCode::kInvalidArgument, "leader node 0 must have no parents");
    }
    for (NodeId i = 0; i < node_count; ++i) {
      std::sort(parents_[i].begin(), parents_[i].end());
      if (i > 0 && parents_[i].empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "node " + std::to_string(i) + " has no parent");
      }
      const std::size_t needed = parents_[i].empty() ? 0 : parents_[i].size() - 1;
      if (i < weights.size() && !weights[i].empty()) {
        if (weights[i].size() != needed) {
          throw Error(ErrorCode::kInvalidArgument,
                      "node " + std::to_string(i) + " needs " +
                          std::to_string(needed) + " weights");
        }
        for (double w : weights[i]) {
          if (!(w >= 0.0 && w <= 1.0)) {
            throw Error(ErrorCode::kInvalidArgument,
                        "weight outside [0,1] at node " + std::to_string(i));
          }
        }
        weights_[i] = weights[i];
      } else {
        weights_[i].resize(needed);
        for (std::size_t j = 0; j < needed; ++j) {
          weights_[i][j] = 1.0 / static_cast<double>(j + 2);
        }
      }
    }
  }

  /// Chain helper: 0 -> 1 -> ... -> n-1.
  static SwarmTopology chain(std::size_t node_count) {
    std::vector<Edge> edges;
    for (NodeId i = 1; i < node_count; ++i) edges.push_back({i - 1, i});
    return SwarmTopology(node_count, edges);
  }

  [[nodiscard]] std::size_t node_count() const { return parents_.size(); }
  [[nodiscard]] std::size_t follower_count() const { return parents_.size() - 1; }
  [[nodiscard]] const std::vector<NodeId>& parents(NodeId i) const { return parents_.at(i); }
  [[nodiscard]] const std::vector<double>& weights(NodeId i) const { return weights_.at(i); }

  [[nodiscard]] std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (NodeId c = 0; c < parents_.size(); ++c) {
      for (NodeId p : parents_[c]) out.push_back({p, c});
    }
    return out;
  }

 private:
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<double>> weights_;
};

/// Kahn's algorithm with a min-heap, so ties are broken by node index.
inline std::vector<NodeId> topological_order(const SwarmTopology& t) {
  const std::size_t n = t.node_count();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<NodeId>> children(n);
  for (NodeId c = 0; c < n; ++c) {
    indegree[c] = t.parents(c).size();
    for (NodeId p : t.parents(c)) children[p].push_back(c);
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const NodeId u = ready.top();
    ready.pop();
    order.push_back(u);
    for (NodeId c : children[u]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != n) {
    throw Error(ErrorCode::kCycleDetected, "communication graph contains a cycle");
  }
  return order;
}

/// Groups nodes by longest-path depth from the roots. Nodes in one layer only
/// depend on earlier layers.
inline std::vector<std::vector<NodeId>> topological_layers(const SwarmTopology& t) {
  const auto order = topological_order(t);
  std::vector<std::size_t> depth(t.node_count(), 0);
  std::size_t max_depth = 0;
  for (NodeId u : order) {
    for (NodeId p : t.parents(u)) depth[u] = std::max(depth[u], depth[p] + 1);
    max_depth = std::max(max_depth, depth[u]);
  }
  std::vector<std::vector<NodeId>> layers(max_depth + 1);
  for (NodeId u : order) layers[depth[u]].push_back(u);
  return layers;
}

/// Iterated geodesic interpolation g12 = g1 exp(l1 log(g1^-1 g2)), folded
/// left to right.
inline Pose convex_pose(std::span<const Pose> poses, std::span<const double> weights) {
  if (poses.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "convex_pose needs at least one pose");
  }
  if (weights.size() + 1 != poses.size()) {
    throw Error(ErrorCode::kInvalidArgument, "convex_pose expects one weight per extra pose");
  }
  Pose acc = poses[0];
  for (std::size_t j = 1; j < poses.size(); ++j) {
    const Twist delta = log_se3(compose(inverse(acc), poses[j]));
    acc = renormalized(compose(acc, exp_se3(weights[j - 1] * delta)));
  }
  return acc;
}

/// Iterated affine blend xi12 = (1 - l1) xi1 + l1 xi2, folded left to right.
inline Twist convex_twist(std::span<const Twist> twists, std::span<const double> weights) {
  if (twists.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "convex_twist needs at least one twist");
  }
  if (weights.size() + 1 != twists.size()) {
    throw Error(ErrorCode::kInvalidArgument, "convex_twist expects one weight per extra twist");
  }
  Twist acc = twists[0];
  for (std::size_t j = 1; j < twists.size(); ++j) {
    const double l = weights[j - 1];
    acc = (1.0 - l) * acc + l * twists[j];
  }
  return acc;
}

/// Poses and twists of one node's parents, in parent-list order.
struct ParentSnapshot {
  std::vector<Pose> poses;
  std::vector<Twist> twists;
};

struct VirtualParent {
  Pose pose;
  Twist twist;
};

inline VirtualParent virtual_parent(const SwarmTopology& t, NodeId i,
                                    const ParentSnapshot& snap) {
  const auto& parents = t.parents(i);
  if (parents.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "the leader has no virtual parent");
  }
  if (snap.poses.size() != parents.size() || snap.twists.size() != parents.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "snapshot size does not match parent list of node " + std::to_string(i));
  }
  return {convex_pose(snap.poses, t.weights(i)), convex_twist(snap.twists, t.weights(i))};
}

}  // namespace rti
