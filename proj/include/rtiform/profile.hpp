#pragma once

// Leader velocity profiles: straight line, constant-twist helix, and piecewise
// angular-velocity schedules.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "rtiform/lie.hpp"

namespace rti {

enum class ProfileKind { kLine, kHelix, kPiecewise };

enum class SegmentShape { kConstant, kSine };

/// omega(t) = amplitude * (shape == kSine ? sin(frequency * (t - start)) : 1)
/// on the interval (start, end]; the first segment also owns t == start.
struct ProfileSegment {
  double start = 0.0;
  double end = std::numeric_limits<double>::infinity();
  SegmentShape shape = SegmentShape::kConstant;
  double frequency = 0.0;
  Vec3 amplitude = Vec3::Zero();

  [[nodiscard]] Vec3 omega_at(double t) const {
    if (shape == SegmentShape::kConstant) return amplitude;
    return amplitude * std::sin(frequency * (t - start));
  }
  /// Upper bound on |d omega / dt| over the segment.
  [[nodiscard]] double rate_bound() const {
    return shape == SegmentShape::kConstant ? 0.0 : amplitude.norm() * std::abs(frequency);
  }
};

struct LeaderProfile {
  ProfileKind kind = ProfileKind::kLine;
  double speed = 5.0;              ///< constant forward speed v_L^x, m/s
  Vec3 omega = Vec3::Zero();       ///< helix angular velocity
  std::vector<ProfileSegment> segments;

  static LeaderProfile line(double speed) {
    LeaderProfile p;
    p.kind = ProfileKind::kLine;
    p.speed = speed;
    return p;
  }
  static LeaderProfile helix(double speed, const Vec3& omega) {
    LeaderProfile p;
    p.kind = ProfileKind::kHelix;
    p.speed = speed;
    p.omega = omega;
    return p;
  }
  static LeaderProfile piecewise(double speed, std::vector<ProfileSegment> segments) {
    LeaderProfile p;
    p.kind = ProfileKind::kPiecewise;
    p.speed = speed;
    p.segments = std::move(segments);
    return p;
  }

  /// Straight line, 2-D turn, pause, 3-D ramp, then a constant 3-D rotation.
  static LeaderProfile table_schedule(double speed) {
    constexpr double f = 0.1 * std::numbers::pi;
    constexpr double inf = std::numeric_limits<double>::infinity();
    return piecewise(speed, {
        {0.0, 20.0, SegmentShape::kSine, f, Vec3(0.0, -0.15, 0.0)},
        {20.0, 30.0, SegmentShape::kSine, f, Vec3(0.0, 0.0, -0.25)},
        {30.0, 50.0, SegmentShape::kConstant, 0.0, Vec3::Zero()},
        {50.0, 55.0, SegmentShape::kSine, f, Vec3(0.1, 0.15, 0.2)},
        {55.0, inf, SegmentShape::kConstant, 0.0, Vec3(0.1, 0.15, 0.2)},
    });
  }

  [[nodiscard]] bool is_time_invariant() const {
    if (kind != ProfileKind::kPiecewise) return true;
    for (const auto& s : segments) {
      if (s.shape != SegmentShape::kConstant) return false;
      if (s.amplitude != segments.front().amplitude) return false;
    }
    return true;
  }

  [[nodiscard]] bool turns() const {
    switch (kind) {
      case ProfileKind::kLine: return false;
      case ProfileKind::kHelix: return omega.norm() > 0.0;
      case ProfileKind::kPiecewise:
        for (const auto& s : segments) {
          if (s.amplitude.norm() > 0.0) return true;
        }
        return false;
    }
    return false;
  }

  /// Times at which the piecewise schedule switches segments.
  [[nodiscard]] std::vector<double> breakpoints() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < segments.size(); ++i) out.push_back(segments[i].start);
    return out;
  }

  /// Throws kInvalidArgument when the profile cannot describe forward flight
  /// or the schedule leaves gaps or overlaps.
  void validate(double horizon) const {
    if (!(speed > 0.0) || !std::isfinite(speed)) {
      throw Error(ErrorCode::kInvalidArgument, "leader speed must be positive");
    }
    if (!omega.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "helix angular velocity must be finite");
    }
    if (kind != ProfileKind::kPiecewise) return;
    if (segments.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "piecewise profile has no segments");
    }
    if (segments.front().start != 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "schedule must start at t = 0");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& s = segments[i];
      if (!(s.end > s.start)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "segment " + std::to_string(i) + " has empty interval");
      }
      if (!s.amplitude.allFinite() || !std::isfinite(s.frequency)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "segment " + std::to_string(i) + " is not finite");
      }
      if (i + 1 < segments.size() && segments[i + 1].start != s.end) {
        throw Error(ErrorCode::kInvalidArgument,
                    "segments " + std::to_string(i) + " and " + std::to_string(i + 1) +
                        " leave a gap or overlap");
      }
    }
    if (segments.back().end < horizon) {
      throw Error(ErrorCode::kInvalidArgument, "schedule ends before the simulation horizon");
    }
  }
};

inline Twist leader_twist_at(const LeaderProfile& profile, double t) {
  if (!(t >= 0.0)) {
    throw Error(ErrorCode::kOutOfSchedule, "negative time " + std::to_string(t));
  }
  const Vec3 forward(profile.speed, 0.0, 0.0);
  switch (profile.kind) {
    case ProfileKind::kLine: return {Vec3::Zero(), forward};
    case ProfileKind::kHelix: return {profile.omega, forward};
    case ProfileKind::kPiecewise: break;
  }
  const auto& segs = profile.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const bool owns_start = i == 0 && t == segs[i].start;
    if (owns_start || (t > segs[i].start && t <= segs[i].end)) {
      return {segs[i].omega_at(t), forward};
    }
  }
  throw Error(ErrorCode::kOutOfSchedule, "no segment covers t = " + std::to_string(t));
}

}  // namespace rti
