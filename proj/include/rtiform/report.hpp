#pragma once

// Per-follower feasibility report for a scenario.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rtiform/feasibility.hpp"
#include "rtiform/scenario.hpp"
#include "rtiform/simulator.hpp"

namespace rti {

enum class FeasibilityStatus { kOk, kHoverRequired, kResidual, kSaturation };

constexpr const char* to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::kOk: return "ok";
    case FeasibilityStatus::kHoverRequired: return "HoverRequired";
    case FeasibilityStatus::kResidual: return "residual";
    case FeasibilityStatus::kSaturation: return "saturation";
  }
  return "?";
}

struct FeasibilityRow {
  NodeId uav = 0;
  std::vector<NodeId> parents;
  FormationKind kind = FormationKind::kRti;
  FeasibilityStatus status = FeasibilityStatus::kOk;
  EulerAngles angles;            ///< relative attitude at t = 0
  double residual = 0.0;         ///< worst nonholonomic residual over the samples
  double residual_tol = kSynthesisResidualTol;
  bool identity_admissible = true;
  bool limits_checked = false;
  double angular_norm = 0.0;     ///< worst ||omega_F|| in formation
  double speed_min = 0.0;        ///< range of in-formation forward speed
  double speed_max = 0.0;
  bool angular_ok = true;
  bool speed_ok = true;
  std::optional<double> offset_bound;  ///< c2, nullopt when unbounded
  double offset_norm = 0.0;
  std::string note;
};

struct FeasibilityReport {
  std::string scenario;
  FormationKind kind = FormationKind::kRti;
  std::size_t samples = 0;
  bool leader_within_limits = true;
  std::vector<FeasibilityRow> rows;

  [[nodiscard]] bool feasible() const {
    return leader_within_limits &&
           std::all_of(rows.begin(), rows.end(),
                       [](const FeasibilityRow& r) { return r.status == FeasibilityStatus::kOk; });
  }
};

/// Evaluates every follower at each sampled instant of the leader profile
/// (t = 0 only for RTI patterns; every tick otherwise). Failures are report
/// content, not exceptions.
inline FeasibilityReport feasibility_report(const Scenario& sc) {
  const SwarmTopology topo = sc.topology();
  const auto order = topological_order(topo);
  const std::size_t n = topo.node_count();

  FeasibilityReport rep;
  rep.scenario = sc.name;
  rep.kind = classify(sc.profile);
  std::vector<double> times{0.0};
  if (rep.kind == FormationKind::kPseudoRti) {
    for (std::size_t k = 1; k <= sc.tick_count(); ++k) times.push_back(static_cast<double>(k) * sc.step);
  }
  rep.samples = times.size();

  rep.rows.resize(n - 1);
  for (NodeId i = 1; i < n; ++i) {
    auto& row = rep.rows[i - 1];
    row.uav = i;
    row.parents = topo.parents(i);
    row.kind = rep.kind;
    row.offset_norm = sc.followers[i - 1].offset.norm();
    row.residual_tol = sc.followers[i - 1].attitude_override ? kUserResidualTol : kSynthesisResidualTol;
    row.speed_min = std::numeric_limits<double>::infinity();
    row.speed_max = -std::numeric_limits<double>::infinity();
    if (sc.limits) {
      row.limits_checked = true;
      row.offset_bound = max_offset_norm(sc.limits->leader, sc.limits->follower, sc.profile.turns());
    }
  }

  std::vector<bool> hovering(n, false);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Twist lead = leader_twist_at(sc.profile, times[k]);
    if (sc.limits) {
      const auto& L = sc.limits->leader;
      if (lead.angular.norm() > L.angular_cap || lead.linear.x() < L.linear_lower ||
          lead.linear.x() > L.linear_upper) {
        rep.leader_within_limits = false;
      }
    }
    // Propagate node by node so one hovering follower does not hide the rest.
    std::vector<Twist> twists(n);
    twists[0] = lead;
    std::vector<Twist> buf;
    for (NodeId i : order) {
      if (i == 0) continue;
      auto& row = rep.rows[i - 1];
      buf.clear();
      for (NodeId p : topo.parents(i)) buf.push_back(twists[p]);
      const Twist parent = convex_twist(buf, topo.weights(i));
      const FollowerConfig& f = sc.followers[i - 1];
      bool upstream_hover = false;
      for (NodeId p : topo.parents(i)) upstream_hover = upstream_hover || hovering[p];
      if (upstream_hover) {
        hovering[i] = true;
        if (row.status == FeasibilityStatus::kOk) {
          row.status = FeasibilityStatus::kHoverRequired;
          row.note = "parent cannot hold its pattern";
        }
        continue;
      }
      FormationSpec spec;
      try {
        spec = f.attitude_override
                   ? FormationSpec::from_angles(f.offset, *f.attitude_override, rep.kind)
                   : synthesize_formation(parent, f.offset, f.roll, rep.kind);
        if (f.attitude_override) (void)tau(parent, f.offset);
      } catch (const Error& e) {
        hovering[i] = true;
        row.status = FeasibilityStatus::kHoverRequired;
        char buf_t[64];
        std::snprintf(buf_t, sizeof buf_t, "t = %.3f: ", times[k]);
        row.note = buf_t + std::string(e.what());
        continue;
      }
      if (k == 0) row.angles = spec.generating_angles;
      row.residual = std::max(row.residual, nonholonomic_residual(spec, parent));
      row.identity_admissible = row.identity_admissible && identity_attitude_feasible(parent, f.offset);
      twists[i] = maintenance_velocity(spec, parent);
      row.angular_norm = std::max(row.angular_norm, twists[i].angular.norm());
      row.speed_min = std::min(row.speed_min, twists[i].linear.x());
      row.speed_max = std::max(row.speed_max, twists[i].linear.x());
      if (sc.limits) {
        const SaturationReport s = check_saturation(spec, parent, sc.limits->follower);
        row.angular_ok = row.angular_ok && s.angular_ok;
        row.speed_ok = row.speed_ok && s.speed_ok;
      }
    }
  }

  for (auto& row : rep.rows) {
    if (row.status != FeasibilityStatus::kOk) continue;
    if (row.residual > row.residual_tol) {
      row.status = FeasibilityStatus::kResidual;
      row.note = "relative attitude violates the nonholonomic constraint";
    } else if (!row.angular_ok || !row.speed_ok) {
      row.status = FeasibilityStatus::kSaturation;
      row.note = !row.speed_ok ? "forward speed leaves the follower band"
                               : "angular speed exceeds the follower cap";
    }
  }
  return rep;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string join_ids(const std::vector<NodeId>& ids, char sep) {
  std::string out;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) out += sep;
    out += std::to_string(ids[k]);
  }
  return out;
}

}  // namespace detail

inline std::string render_text(const FeasibilityReport& rep) {
  std::ostringstream os;
  os << "scenario " << rep.scenario << ": " << to_string(rep.kind) << " pattern, "
     << rep.samples << " sample(s)\n";
  if (!rep.leader_within_limits) os << "  leader profile exceeds its own limits\n";
  for (const auto& r : rep.rows) {
    char line[512];
    std::snprintf(line, sizeof line,
                  "  uav %zu <- {%s}: %-13s roll %+.4f pitch %+.4f yaw %+.4f  residual %.2e"
                  "  |w| %.4f  vx [%.4f, %.4f]",
                  r.uav, detail::join_ids(r.parents, ',').c_str(), to_string(r.status),
                  r.angles.roll, r.angles.pitch, r.angles.yaw, r.residual, r.angular_norm,
                  r.speed_min, r.speed_max);
    os << line;
    if (r.limits_checked) {
      os << "  c2 " << (r.offset_bound ? detail::fmt_double(*r.offset_bound) : "unbounded")
         << " vs |p| " << detail::fmt_double(r.offset_norm);
    }
    if (r.identity_admissible) os << "  (identity attitude admissible)";
    if (!r.note.empty()) os << "  -- " << r.note;
    os << '\n';
  }
  os << (rep.feasible() ? "feasible\n" : "infeasible\n");
  return os.str();
}

inline constexpr const char* kFeasibilityCsvHeader =
    "uav,parents,kind,status,roll,pitch,yaw,residual,identity_ok,omega_norm,"
    "vx_min,vx_max,omega_ok,vx_ok,c2,offset_norm";

inline std::string render_csv(const FeasibilityReport& rep) {
  using detail::fmt_double;
  std::ostringstream os;
  os << kFeasibilityCsvHeader << '\n';
  for (const auto& r : rep.rows) {
    const bool hover = r.status == FeasibilityStatus::kHoverRequired;
    os << r.uav << ',' << detail::join_ids(r.parents, ' ') << ',' << to_string(r.kind) << ','
       << to_string(r.status) << ',' << fmt_double(r.angles.roll) << ','
       << fmt_double(r.angles.pitch) << ',' << fmt_double(r.angles.yaw) << ','
       << fmt_double(r.residual) << ',' << (r.identity_admissible ? 1 : 0) << ','
       << fmt_double(r.angular_norm) << ',' << (hover ? "nan" : fmt_double(r.speed_min)) << ','
       << (hover ? "nan" : fmt_double(r.speed_max)) << ',';
    if (r.limits_checked) {
      os << (r.angular_ok ? 1 : 0) << ',' << (r.speed_ok ? 1 : 0) << ','
         << (r.offset_bound ? fmt_double(*r.offset_bound) : "inf");
    } else {
      os << ",,";
    }
    os << ',' << fmt_double(r.offset_norm) << '\n';
  }
  return os.str();
}

}  // namespace rti
