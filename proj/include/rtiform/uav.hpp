#pragma once

// Fixed-wing UAV as a nonholonomic rigid body on SE(3).

#include <cmath>
#include <numbers>

#include "rtiform/lie.hpp"

namespace rti {

inline constexpr double kNonholonomicTol = 1e-12;
inline constexpr double kIntegratedNonholonomicTol = 1e-9;
inline constexpr double kDefaultStep = 0.01;

struct UavState {
  Pose pose;
  Twist twist;
};

/// Roll-pitch-yaw angles for the phi-theta-psi sequence, R = Rz(psi) Ry(theta) Rx(phi).
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

struct EulerExtraction {
  EulerAngles angles;
  bool degenerate = false;  ///< pitch at +-pi/2; roll folded into yaw
};

inline Rotation euler_to_rotation(const EulerAngles& a) {
  const double cf = std::cos(a.roll), sf = std::sin(a.roll);
  const double ct = std::cos(a.pitch), st = std::sin(a.pitch);
  const double cp = std::cos(a.yaw), sp = std::sin(a.yaw);
  Rotation R;
  // clang-format off
  R << cp * ct, -sp * cf + cp * st * sf,  sp * sf + cp * st * cf,
       sp * ct,  cp * cf + sp * st * sf, -cp * sf + sp * st * cf,
       -st,      ct * sf,                 ct * cf;
  // clang-format on
  return R;
}

/// Diagnostic inverse of euler_to_rotation. Within 1e-6 of the gimbal lock the
/// roll is pinned to zero and the remaining freedom goes into yaw.
inline EulerExtraction rotation_to_euler(const Rotation& R) {
  constexpr double kGimbalMargin = 1e-6;
  const double horizontal = std::hypot(R(0, 0), R(1, 0));
  const double pitch = std::atan2(-R(2, 0), horizontal);
  EulerExtraction out;
  if (std::abs(pitch) >= std::numbers::pi / 2.0 - kGimbalMargin) {
    out.degenerate = true;
    out.angles.roll = 0.0;
    out.angles.pitch = std::copysign(std::numbers::pi / 2.0, pitch);
    out.angles.yaw = std::atan2(-R(0, 1), R(1, 1));
    return out;
  }
  out.angles.roll = std::atan2(R(2, 1), R(2, 2));
  out.angles.pitch = pitch;
  out.angles.yaw = std::atan2(R(1, 0), R(0, 0));
  return out;
}

/// True iff the body-frame lateral and vertical speeds vanish within tol.
inline bool is_nonholonomic(const Twist& xi, double tol = kNonholonomicTol) {
  if (!(tol >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tolerance must be non-negative");
  }
  return std::abs(xi.linear.y()) <= tol && std::abs(xi.linear.z()) <= tol;
}

/// Exact flow of g' = g xi^ over h seconds for a constant twist.
inline Pose step(const Pose& pose, const Twist& xi, double h) {
  if (!(h > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  }
  return renormalized(compose(pose, exp_se3(h * xi)));
}

inline Pose step(const UavState& state, const Twist& xi, double h) {
  return step(state.pose, xi, h);
}

/// Euler-angle rates for a body angular velocity. Diagnostics only.
inline Vec3 euler_rates(const EulerAngles& a, const Vec3& omega) {
  const double ct = std::cos(a.pitch);
  if (std::abs(ct) <= 1e-9) {
    throw Error(ErrorCode::kGimbalLock, "cos(pitch) vanishes");
  }
  const double sf = std::sin(a.roll), cf = std::cos(a.roll);
  const double tt = std::tan(a.pitch);
  Mat3 M;
  // clang-format off
  M << 1.0, tt * sf,      tt * cf,
       0.0, cf,          -sf,
       0.0, sf / ct,      cf / ct;
  // clang-format on
  return M * omega;
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

}  // namespace rti
