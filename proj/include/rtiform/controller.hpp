#pragma once

// Leader-follower formation controller for nonholonomic fixed-wing UAVs.
//
// The follower tracks a virtual leader g_C = g_L gbar rigidly attached to its
// (virtual) parent. A fully actuated log-feedback law gives the standard
// velocity Xi = (Omega, Lambda); the lateral and vertical parts of Lambda
// cannot be commanded, so they are dropped and replaced by an extra angular
// velocity Omega_AD that turns the body x-axis toward Lambda.

#include <cmath>
#include <cstdint>

#include "rtiform/feasibility.hpp"
#include "rtiform/lie.hpp"
#include "rtiform/topology.hpp"

namespace rti {

struct ControlGains {
  double k_p = 1.0;  ///< log-feedback gain, 1/s
  double k_a = 1.0;  ///< compensation gain

  [[nodiscard]] bool valid() const { return k_p > 0.0 && k_a > 0.0; }
};

struct StandardVelocity {
  Vec3 angular = Vec3::Zero();  ///< Omega
  Vec3 linear = Vec3::Zero();   ///< Lambda
};

/// Bit flags attached to one control evaluation.
enum ControlFlag : std::uint32_t {
  kFlagNone = 0,
  kFlagTargetBehind = 1u << 0,  ///< Lambda^x < 0
  kFlagSpeedLow = 1u << 1,      ///< forward speed clamped up to beta_low
  kFlagSpeedHigh = 1u << 2,     ///< forward speed clamped down to beta_up
  kFlagAngular = 1u << 3,       ///< ||omega|| scaled down to alpha
};

struct ControlOutput {
  Twist twist;  ///< linear part is (Lambda^x, 0, 0), possibly clamped
  std::uint32_t flags = kFlagNone;
};

/// g_C = g_L gbar, xi_C = Ad_{gbar^-1} xi_L.
inline VirtualParent virtual_leader(const VirtualParent& leader, const FormationSpec& spec) {
  return {compose(leader.pose, spec.pose()), maintenance_velocity(spec, leader.twist)};
}

/// Xi = -k_p log(gbar^-1 g_LF) + Ad_{g_LF^-1} xi_L with g_LF = g_L^-1 g_F.
inline StandardVelocity standard_velocity(const VirtualParent& leader, const Pose& follower_pose,
                                          const FormationSpec& spec, const ControlGains& gains) {
  const Pose g_lf = compose(inverse(leader.pose), follower_pose);
  const Twist err = log_se3(compose(inverse(spec.pose()), g_lf));
  const Twist ff = adjoint(inverse(g_lf), leader.twist);
  const Twist xi = (-gains.k_p) * err + ff;
  return {xi.angular, xi.linear};
}

inline constexpr double kDegenerateDirection = 1e-9;

/// Rotation about body z taking e1 to the (x, y) projection of Lambda.
inline Rotation compensation_yaw_frame(const Vec3& lambda) {
  const Vec3 n(lambda.x(), lambda.y(), 0.0);
  if (n.norm() <= kDegenerateDirection) return Rotation::Identity();
  const Vec3 n_perp = Vec3::UnitZ().cross(n);
  Rotation R;
  R.col(0) = n / n.norm();
  R.col(1) = n_perp / n_perp.norm();
  R.col(2) = Vec3::UnitZ();
  return R;
}

/// Rotation about body y taking e1 to the (x, z) projection of Lambda. The
/// third column is m x e2, which keeps the frame right-handed.
inline Rotation compensation_pitch_frame(const Vec3& lambda) {
  const Vec3 m(lambda.x(), 0.0, lambda.z());
  if (m.norm() <= kDegenerateDirection) return Rotation::Identity();
  const Vec3 m_hat = m / m.norm();
  Rotation R;
  R.col(0) = m_hat;
  R.col(1) = Vec3::UnitY();
  R.col(2) = m_hat.cross(Vec3::UnitY());
  return R;
}

/// Omega_AD = log(R_y)^vee + log(R_z)^vee. Both frames are single-axis
/// rotations, so their logarithms reduce to planar angles; this also keeps the
/// result defined when Lambda points straight backwards.
inline Vec3 compensation_rotation(const Vec3& lambda) {
  Vec3 out = Vec3::Zero();
  if (Vec3(lambda.x(), lambda.y(), 0.0).norm() > kDegenerateDirection) {
    out.z() = std::atan2(lambda.y(), lambda.x());
  }
  if (Vec3(lambda.x(), 0.0, lambda.z()).norm() > kDegenerateDirection) {
    out.y() = std::atan2(-lambda.z(), lambda.x());
  }
  return out;
}

/// omega_F = Omega + k_a Omega_AD, v_F = (Lambda^x, 0, 0). When limits are
/// given the forward speed is clamped into [beta_low, beta_up] and the angular
/// velocity is scaled to alpha; each intervention is flagged.
inline ControlOutput control(const VirtualParent& leader, const Pose& follower_pose,
                             const FormationSpec& spec, const ControlGains& gains,
                             const VelocityLimits* limits = nullptr) {
  const StandardVelocity xi = standard_velocity(leader, follower_pose, spec, gains);
  ControlOutput out;
  out.twist.angular = xi.angular + gains.k_a * compensation_rotation(xi.linear);
  out.twist.linear = Vec3(xi.linear.x(), 0.0, 0.0);
  if (xi.linear.x() < 0.0) out.flags |= kFlagTargetBehind;
  if (limits != nullptr) {
    double& vx = out.twist.linear.x();
    if (vx < limits->linear_lower) {
      vx = limits->linear_lower;
      out.flags |= kFlagSpeedLow;
    } else if (vx > limits->linear_upper) {
      vx = limits->linear_upper;
      out.flags |= kFlagSpeedHigh;
    }
    const double wn = out.twist.angular.norm();
    if (wn > limits->angular_cap) {
      out.twist.angular *= limits->angular_cap / wn;
      out.flags |= kFlagAngular;
    }
  }
  return out;
}

/// X_CF = log(g_C^-1 g_F)^vee; zero exactly when the follower sits on the
/// virtual leader.
inline Vec6 error_coordinates(const Pose& virtual_leader_pose, const Pose& follower_pose) {
  return log_se3(compose(inverse(virtual_leader_pose), follower_pose)).vector();
}

}  // namespace rti
