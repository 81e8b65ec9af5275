#pragma once

// Feasibility of formation patterns under the nonholonomic constraint and the
// velocity saturation bounds, plus synthesis of the relative attitude.

#include <cmath>
#include <optional>

#include "rtiform/lie.hpp"
#include "rtiform/profile.hpp"
#include "rtiform/uav.hpp"

namespace rti {

inline constexpr double kHoverTol = 1e-12;
inline constexpr double kSynthesisResidualTol = 1e-10;
inline constexpr double kUserResidualTol = 1e-9;
inline constexpr double kNormRoundingTol = 1e-12;

enum class FormationKind { kRti, kPseudoRti };

constexpr const char* to_string(FormationKind k) {
  return k == FormationKind::kRti ? "RTI" : "P-RTI";
}

/// Desired pose of a follower relative to its (virtual) parent.
struct FormationSpec {
  Vec3 relative_position = Vec3::Zero();
  Rotation relative_attitude = Rotation::Identity();
  EulerAngles generating_angles;
  FormationKind kind = FormationKind::kRti;

  static FormationSpec from_angles(const Vec3& offset, const EulerAngles& angles,
                                   FormationKind kind = FormationKind::kRti) {
    return {offset, euler_to_rotation(angles), angles, kind};
  }

  [[nodiscard]] Pose pose() const { return {relative_attitude, relative_position}; }
};

/// Components of omega_L^ p + v_L, the leader velocity transported to the
/// follower's offset.
struct TauVector {
  Vec3 value = Vec3::Zero();

  [[nodiscard]] double x() const { return value.x(); }
  [[nodiscard]] double y() const { return value.y(); }
  [[nodiscard]] double z() const { return value.z(); }
  [[nodiscard]] double norm() const { return value.norm(); }
};

struct VelocityLimits {
  double angular_cap = 0.0;  ///< alpha, rad/s
  double linear_lower = 0.0; ///< beta_low, m/s
  double linear_upper = 0.0; ///< beta_up, m/s

  [[nodiscard]] bool valid() const {
    return angular_cap > 0.0 && linear_lower > 0.0 && linear_lower < linear_upper;
  }
};

/// alpha_F = alpha_L and beta_low,F < beta_low,L < beta_up,L < beta_up,F.
inline bool limits_pairing_ok(const VelocityLimits& leader, const VelocityLimits& follower) {
  return leader.valid() && follower.valid() && follower.angular_cap == leader.angular_cap &&
         follower.linear_lower < leader.linear_lower &&
         leader.linear_lower < leader.linear_upper &&
         leader.linear_upper < follower.linear_upper;
}

/// Follower twist that keeps the pattern exactly: Ad_{gbar^-1} xi_L.
inline Twist maintenance_velocity(const FormationSpec& spec, const Twist& leader_twist) {
  return adjoint(inverse(spec.pose()), leader_twist);
}

inline TauVector tau(const Twist& leader_twist, const Vec3& offset) {
  const Vec3& w = leader_twist.angular;
  const Vec3& v = leader_twist.linear;
  const TauVector t{w.cross(offset) + v};
  if (t.norm() <= kHoverTol) {
    throw Error(ErrorCode::kHoverRequired,
                "offset requires zero follower speed; fixed-wing UAVs cannot hover");
  }
  return t;
}

/// Yaw and pitch that align the follower's body x-axis with tau; roll is free.
/// The two-argument arctangent with a non-negative horizontal denominator
/// selects the branch with positive forward speed |tau|.
inline EulerAngles synthesize_attitude(const TauVector& t, double roll) {
  if (t.norm() <= kHoverTol) {
    throw Error(ErrorCode::kHoverRequired, "tau vanishes");
  }
  EulerAngles a;
  a.roll = roll;
  a.yaw = std::atan2(t.y(), t.x());
  const double horizontal = std::cos(a.yaw) * t.x() + std::sin(a.yaw) * t.y();
  a.pitch = std::atan2(-t.z(), horizontal);
  return a;
}

/// The two scalar nonholonomic constraints on (phi, theta, psi) written out in
/// trigonometric form. Both vanish for a feasible pattern.
inline Eigen::Vector2d attitude_constraint_residuals(const EulerAngles& a, const TauVector& t) {
  const double sf = std::sin(a.roll), cf = std::cos(a.roll);
  const double st = std::sin(a.pitch), ct = std::cos(a.pitch);
  const double sp = std::sin(a.yaw), cp = std::cos(a.yaw);
  const double first = (-sp * cf + cp * st * sf) * t.x() + (cp * cf + sp * st * sf) * t.y() +
                       ct * sf * t.z();
  const double second = (sp * sf + cp * st * cf) * t.x() + (-cp * sf + sp * st * cf) * t.y() +
                        ct * cf * t.z();
  return {first, second};
}

/// ||[e2 e3]^T Rbar^T (omega_L^ p + v_L)||: lateral and vertical body speed
/// the follower would need to hold the pattern.
inline double nonholonomic_residual(const FormationSpec& spec, const Twist& leader_twist) {
  const Vec3 w = leader_twist.angular;
  const Vec3 body = spec.relative_attitude.transpose() *
                    (w.cross(spec.relative_position) + leader_twist.linear);
  return body.tail<2>().norm();
}

inline FormationSpec synthesize_formation(const Twist& leader_twist, const Vec3& offset,
                                          double roll,
                                          FormationKind kind = FormationKind::kRti) {
  const EulerAngles angles = synthesize_attitude(tau(leader_twist, offset), roll);
  return FormationSpec::from_angles(offset, angles, kind);
}

inline FormationKind classify(const LeaderProfile& profile) {
  return profile.is_time_invariant() ? FormationKind::kRti : FormationKind::kPseudoRti;
}

/// Sufficient condition for the identity relative attitude: the leader flies
/// straight, or it neither rolls nor has the follower ahead or behind it.
inline bool identity_attitude_feasible(const Twist& leader_twist, const Vec3& offset) {
  const Vec3& w = leader_twist.angular;
  if (w.isZero(0.0)) return true;
  return w.x() == 0.0 && offset.x() == 0.0;
}

/// Largest admissible ||p|| that keeps the follower's forward speed inside its
/// band. std::nullopt means unbounded (leader flies straight).
inline std::optional<double> max_offset_norm(const VelocityLimits& leader,
                                             const VelocityLimits& follower,
                                             bool leader_turns) {
  if (!leader_turns) return std::nullopt;
  return std::min((follower.linear_upper - leader.linear_upper) / leader.angular_cap,
                  (leader.linear_lower - follower.linear_lower) / leader.angular_cap);
}

struct SaturationReport {
  double angular_norm = 0.0;
  double angular_cap = 0.0;
  bool angular_ok = false;
  double forward_speed = 0.0;
  double speed_lower = 0.0;
  double speed_upper = 0.0;
  bool speed_ok = false;

  [[nodiscard]] bool ok() const { return angular_ok && speed_ok; }
};

inline SaturationReport check_saturation(const FormationSpec& spec, const Twist& leader_twist,
                                         const VelocityLimits& follower) {
  const Twist xi = maintenance_velocity(spec, leader_twist);
  SaturationReport r;
  r.angular_norm = xi.angular.norm();
  r.angular_cap = follower.angular_cap;
  // ||omega_F|| = ||omega_L|| exactly; allow the rounding of the rotation.
  r.angular_ok = r.angular_norm <= follower.angular_cap * (1.0 + kNormRoundingTol);
  r.forward_speed = xi.linear.x();
  r.speed_lower = follower.linear_lower;
  r.speed_upper = follower.linear_upper;
  r.speed_ok = r.forward_speed >= follower.linear_lower &&
               r.forward_speed <= follower.linear_upper;
  return r;
}

}  // namespace rti
