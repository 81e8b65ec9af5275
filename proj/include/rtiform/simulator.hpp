#pragma once

// Closed-loop swarm simulation over the communication DAG.
//
// Each tick: the leader twist comes from the profile; followers are evaluated
// layer by layer in topological order, reading the committed poses of the
// tick and the twists their parents were just assigned; finally every pose is
// advanced with the exact exponential step.

#include <atomic>
#include <barrier>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "rtiform/controller.hpp"
#include "rtiform/feasibility.hpp"
#include "rtiform/scenario.hpp"
#include "rtiform/topology.hpp"

namespace rti {

struct TrajectoryRow {
  double time = 0.0;
  NodeId uav = 0;
  Pose pose;
  Twist twist;                 ///< commanded for [time, time + h)
  double error_norm = 0.0;     ///< ||X_CF||
  EulerAngles relative;        ///< attitude relative to the virtual parent
  std::uint32_t flags = kFlagNone;
};

/// Rows ordered by tick, then node id.
struct TrajectoryLog {
  std::size_t node_count = 0;
  double step = 0.0;
  std::vector<TrajectoryRow> rows;

  [[nodiscard]] std::size_t tick_count() const {
    return node_count == 0 ? 0 : rows.size() / node_count;
  }
  [[nodiscard]] const TrajectoryRow& at(std::size_t tick, NodeId uav) const {
    return rows.at(tick * node_count + uav);
  }
};

/// Desired patterns and in-formation twists of every node at one instant.
struct NominalFormation {
  std::vector<FormationSpec> specs;  ///< index 0 unused
  std::vector<Twist> twists;         ///< twist each node has once in formation
  std::vector<Twist> parent_twists;  ///< convex twist of each node's parents
};

/// Propagates the leader twist down the DAG, synthesizing each relative
/// attitude from the twist its virtual parent has in formation.
inline NominalFormation nominal_formation(const Scenario& sc, const SwarmTopology& topo,
                                          const std::vector<NodeId>& order,
                                          const Twist& leader_twist, FormationKind kind) {
  const std::size_t n = topo.node_count();
  NominalFormation out;
  out.specs.resize(n);
  out.twists.resize(n);
  out.parent_twists.resize(n);
  out.twists[0] = leader_twist;
  std::vector<Twist> buf;
  for (NodeId i : order) {
    if (i == 0) continue;
    buf.clear();
    for (NodeId p : topo.parents(i)) buf.push_back(out.twists[p]);
    const Twist parent = convex_twist(buf, topo.weights(i));
    const FollowerConfig& f = sc.followers[i - 1];
    try {
      out.specs[i] = f.attitude_override
                         ? FormationSpec::from_angles(f.offset, *f.attitude_override, kind)
                         : synthesize_formation(parent, f.offset, f.roll, kind);
    } catch (const Error& e) {
      throw Error(e.code(), "node " + std::to_string(i) + ": " + e.detail());
    }
    out.parent_twists[i] = parent;
    out.twists[i] = maintenance_velocity(out.specs[i], parent);
  }
  return out;
}

/// Initial poses in node order.
inline std::vector<Pose> initial_poses(const Scenario& sc, const SwarmTopology& topo,
                                       const std::vector<NodeId>& order,
                                       const NominalFormation& plan) {
  std::vector<Pose> poses(topo.node_count());
  poses[0] = sc.leader_initial;
  std::vector<Pose> buf;
  for (NodeId i : order) {
    if (i == 0) continue;
    const FollowerConfig& f = sc.followers[i - 1];
    if (f.initial_pose) {
      poses[i] = *f.initial_pose;
      continue;
    }
    buf.clear();
    for (NodeId p : topo.parents(i)) buf.push_back(poses[p]);
    try {
      const Pose parent = convex_pose(buf, topo.weights(i));
      poses[i] = renormalized(compose(compose(parent, plan.specs[i].pose()),
                                      exp_se3(Twist::from_vector(f.initial_error))));
    } catch (const Error& e) {
      throw Error(e.code(), "initial pose of node " + std::to_string(i) + ": " + e.detail());
    }
  }
  return poses;
}

struct RunOptions {
  bool parallel = false;
  std::size_t workers = 0;  ///< 0: hardware concurrency
};

namespace detail {

/// Persistent workers that execute one indexed batch at a time. Results are
/// written into caller-owned slots, so scheduling never affects output.
class BatchPool {
 public:
  explicit BatchPool(std::size_t workers)
      : sync_(static_cast<std::ptrdiff_t>(workers + 1)) {
    for (std::size_t w = 0; w < workers; ++w) {
      threads_.emplace_back([this] { loop(); });
    }
  }
  BatchPool(const BatchPool&) = delete;
  BatchPool& operator=(const BatchPool&) = delete;
  ~BatchPool() {
    stop_ = true;
    sync_.arrive_and_wait();
  }

  void run(std::size_t count, const std::function<void(std::size_t)>& job) {
    job_ = &job;
    count_ = count;
    next_ = 0;
    sync_.arrive_and_wait();
    drain();
    sync_.arrive_and_wait();
  }

 private:
  void loop() {
    for (;;) {
      sync_.arrive_and_wait();
      if (stop_) return;
      drain();
      sync_.arrive_and_wait();
    }
  }
  void drain() {
    for (std::size_t k = next_.fetch_add(1); k < count_; k = next_.fetch_add(1)) (*job_)(k);
  }

  std::barrier<> sync_;
  std::vector<std::jthread> threads_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t count_ = 0;
  std::atomic<std::size_t> next_{0};
  std::atomic<bool> stop_{false};
};

}  // namespace detail

inline TrajectoryLog run(const Scenario& sc, const RunOptions& opts = {}) {
  sc.validate();
  const SwarmTopology topo = sc.topology();
  const auto order = topological_order(topo);
  const auto layers = topological_layers(topo);
  const std::size_t n = topo.node_count();
  const std::size_t ticks = sc.tick_count();
  const FormationKind kind = classify(sc.profile);
  const VelocityLimits* limits = sc.limits ? &sc.limits->follower : nullptr;

  NominalFormation plan =
      nominal_formation(sc, topo, order, leader_twist_at(sc.profile, 0.0), kind);
  std::vector<Pose> poses = initial_poses(sc, topo, order, plan);

  TrajectoryLog log;
  log.node_count = n;
  log.step = sc.step;
  log.rows.reserve((ticks + 1) * n);

  std::vector<TrajectoryRow> tick_rows(n);
  std::vector<std::exception_ptr> failures(n);
  std::unique_ptr<detail::BatchPool> pool;
  if (opts.parallel) {
    std::size_t w = opts.workers != 0 ? opts.workers : std::thread::hardware_concurrency();
    pool = std::make_unique<detail::BatchPool>(std::max<std::size_t>(w, 1));
  }

  std::size_t tick = 0;
  double t = 0.0;
  const auto evaluate = [&](NodeId i) {
    const auto& parents = topo.parents(i);
    ParentSnapshot snap;
    snap.poses.reserve(parents.size());
    snap.twists.reserve(parents.size());
    for (NodeId p : parents) {
      snap.poses.push_back(poses[p]);
      snap.twists.push_back(tick_rows[p].twist);
    }
    const VirtualParent vp = virtual_parent(topo, i, snap);
    const FormationSpec& spec = plan.specs[i];
    const ControlOutput u = control(vp, poses[i], spec, sc.gains, limits);
    const Pose target = compose(vp.pose, spec.pose());
    TrajectoryRow& row = tick_rows[i];
    row.time = t;
    row.uav = i;
    row.pose = poses[i];
    row.twist = u.twist;
    row.flags = u.flags;
    row.error_norm = error_coordinates(target, poses[i]).norm();
    row.relative = rotation_to_euler(vp.pose.rotation.transpose() * poses[i].rotation).angles;
  };
  const auto guarded = [&](NodeId i) {
    try {
      evaluate(i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  for (tick = 0; tick <= ticks; ++tick) {
    t = static_cast<double>(tick) * sc.step;
    if (kind == FormationKind::kPseudoRti && tick > 0) {
      plan = nominal_formation(sc, topo, order, leader_twist_at(sc.profile, t), kind);
    }
    TrajectoryRow& lead = tick_rows[0];
    lead = TrajectoryRow{};
    lead.time = t;
    lead.pose = poses[0];
    lead.twist = leader_twist_at(sc.profile, t);

    for (std::size_t l = 1; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      if (pool && layer.size() > 1) {
        const std::function<void(std::size_t)> job = [&](std::size_t k) { guarded(layer[k]); };
        pool->run(layer.size(), job);
      } else {
        for (NodeId i : layer) guarded(i);
      }
      for (NodeId i : layer) {
        if (failures[i]) {
          try {
            std::rethrow_exception(failures[i]);
          } catch (const Error& e) {
            throw Error(e.code(), "tick " + std::to_string(tick) + " (t = " +
                                      std::to_string(t) + "), node " + std::to_string(i) +
                                      ": " + e.detail());
          }
        }
      }
    }
    log.rows.insert(log.rows.end(), tick_rows.begin(), tick_rows.end());
    if (tick == ticks) break;
    for (NodeId i = 0; i < n; ++i) poses[i] = step(poses[i], tick_rows[i].twist, sc.step);
  }
  return log;
}

}  // namespace rti
