#pragma once

// SO(3) / SE(3) primitives: hat/vee, exponential and logarithm maps, group
// operations and the adjoint action. All values are fixed-size and passed by
// value.

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>

#include "rtiform/errors.hpp"

namespace rti {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rotation matrices are stored as plain 3x3 matrices; see is_rotation().
using Rotation = Mat3;

inline constexpr double kSmallAngle = 1e-8;
inline constexpr double kSkewTol = 1e-9;
inline constexpr double kPiBranchTol = 1e-9;
inline constexpr double kOrthoTol = 1e-9;

/// Body-frame velocity (omega, v).
struct Twist {
  Vec3 angular = Vec3::Zero();
  Vec3 linear = Vec3::Zero();

  static Twist zero() { return {}; }
  static Twist from_vector(const Vec6& x) {
    return {x.head<3>(), x.tail<3>()};
  }

  [[nodiscard]] Vec6 vector() const {
    Vec6 x;
    x << angular, linear;
    return x;
  }
  [[nodiscard]] bool is_finite() const {
    return angular.allFinite() && linear.allFinite();
  }

  friend Twist operator+(const Twist& a, const Twist& b) {
    return {a.angular + b.angular, a.linear + b.linear};
  }
  friend Twist operator-(const Twist& a, const Twist& b) {
    return {a.angular - b.angular, a.linear - b.linear};
  }
  friend Twist operator*(double s, const Twist& a) {
    return {s * a.angular, s * a.linear};
  }
};

/// Element of SE(3): g = (R, p).
struct Pose {
  Rotation rotation = Rotation::Identity();
  Vec3 position = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from_matrix(const Mat4& m) {
    return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
  }

  [[nodiscard]] Mat4 matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = position;
    return m;
  }
};

inline Mat3 hat3(const Vec3& w) {
  Mat3 s;
  // clang-format off
  s <<  0.0,   -w.z(),  w.y(),
        w.z(),  0.0,   -w.x(),
       -w.y(),  w.x(),  0.0;
  // clang-format on
  return s;
}

/// Inverse of hat3. Throws kNotSkew when ||S + S^T|| exceeds 1e-9.
inline Vec3 vee3(const Mat3& s) {
  if ((s + s.transpose()).norm() > kSkewTol) {
    throw Error(ErrorCode::kNotSkew, "matrix is not skew-symmetric");
  }
  return {s(2, 1), s(0, 2), s(1, 0)};
}

/// 4x4 matrix representation of a twist.
inline Mat4 hat6(const Twist& xi) {
  Mat4 m = Mat4::Zero();
  m.topLeftCorner<3, 3>() = hat3(xi.angular);
  m.topRightCorner<3, 1>() = xi.linear;
  return m;
}

inline Twist vee6(const Mat4& m) {
  return {vee3(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>()};
}

inline Rotation exp_so3(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = hat3(w);
  if (theta < kSmallAngle) {
    return Mat3::Identity() + W + 0.5 * W * W;
  }
  const double half = 0.5 * theta;
  const double s = std::sin(half) / half;
  // (1 - cos t) / t^2 written without cancellation.
  const double b = 0.5 * s * s;
  const double a = std::sin(theta) / theta;
  return Mat3::Identity() + a * W + b * W * W;
}

/// Principal logarithm. Angles within ~3e-5 of pi (trace <= -1 + 1e-9) have
/// no unique answer and throw kNearPiSingularity.
inline Vec3 log_so3(const Rotation& R) {
  const double trace = R.trace();
  if (trace <= -1.0 + kPiBranchTol) {
    throw Error(ErrorCode::kNearPiSingularity,
                "rotation angle is pi; logarithm branch is not unique");
  }
  const Vec3 s = 0.5 * Vec3(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0),
                            R(1, 0) - R(0, 1));
  const double c = 0.5 * (trace - 1.0);
  const double sin_theta = s.norm();
  const double theta = std::atan2(sin_theta, c);
  if (theta < kSmallAngle) {
    return (1.0 + theta * theta / 6.0) * s;
  }
  if (c >= 0.0) {
    return (theta / sin_theta) * s;
  }
  // Obtuse angles: recover the axis from the symmetric part, which stays well
  // conditioned as sin(theta) -> 0. Sign comes from the skew part.
  const Mat3 aat = (0.5 * (R + R.transpose()) - c * Mat3::Identity()) / (1.0 - c);
  Eigen::Index k = 0;
  aat.diagonal().maxCoeff(&k);
  Vec3 axis = aat.col(k) / std::sqrt(aat(k, k));
  axis.normalize();
  if (axis.dot(s) < 0.0) {
    axis = -axis;
  }
  return theta * axis;
}

/// Left Jacobian V(w) of SO(3); position part of exp_se3 is V(w) v.
inline Mat3 left_jacobian_so3(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = hat3(w);
  if (theta < kSmallAngle) {
    return Mat3::Identity() + 0.5 * W + W * W / 6.0;
  }
  const double half = 0.5 * theta;
  const double sh = std::sin(half) / half;
  const double b = 0.5 * sh * sh;
  const double c = (theta - std::sin(theta)) / (theta * theta * theta);
  return Mat3::Identity() + b * W + c * W * W;
}

inline Mat3 left_jacobian_so3_inverse(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = hat3(w);
  if (theta < kSmallAngle) {
    return Mat3::Identity() - 0.5 * W + W * W / 12.0;
  }
  const double half = 0.5 * theta;
  const double coeff =
      (1.0 - half * std::cos(half) / std::sin(half)) / (theta * theta);
  return Mat3::Identity() - 0.5 * W + coeff * W * W;
}

inline Pose exp_se3(const Twist& xi) {
  return {exp_so3(xi.angular), left_jacobian_so3(xi.angular) * xi.linear};
}

inline Twist log_se3(const Pose& g) {
  const Vec3 w = log_so3(g.rotation);
  return {w, left_jacobian_so3_inverse(w) * g.position};
}

inline Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation * b.position + a.position};
}

inline Pose inverse(const Pose& g) {
  const Mat3 Rt = g.rotation.transpose();
  return {Rt, -Rt * g.position};
}

/// Ad_g xi = (g xi^ g^-1)^vee.
inline Twist adjoint(const Pose& g, const Twist& xi) {
  const Vec3 w = g.rotation * xi.angular;
  return {w, g.position.cross(w) + g.rotation * xi.linear};
}

inline double orthonormality_error(const Rotation& R) {
  return (R.transpose() * R - Mat3::Identity()).norm();
}

inline bool is_rotation(const Rotation& R, double tol = kOrthoTol) {
  return orthonormality_error(R) <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

/// Nearest rotation in the Frobenius sense (polar factor via SVD).
inline Rotation nearest_rotation(const Mat3& M) {
  const Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 U = svd.matrixU();
  const Mat3 V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) {
    U.col(2) = -U.col(2);
  }
  return U * V.transpose();
}

/// Re-projects onto SO(3) only once drift exceeds the tolerance, so exact
/// products are left bit-for-bit untouched.
inline Pose renormalized(Pose g, double tol = kOrthoTol) {
  if (orthonormality_error(g.rotation) > tol) {
    g.rotation = nearest_rotation(g.rotation);
  }
  return g;
}

}  // namespace rti
