#pragma once

// Shared generators for the property tests. Every generator draws from a
// caller-owned, fixed-seed engine so failures replay exactly.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "rtiform/rtiform.hpp"

namespace rti::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Uniformly distributed direction on the unit sphere.
inline Vec3 unit_vector(Rng& rng) {
  std::normal_distribution<double> n;
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

/// Vector with norm uniform in [0, max_norm].
inline Vec3 ball_vector(Rng& rng, double max_norm) {
  return uniform(rng, 0.0, max_norm) * unit_vector(rng);
}

inline Rotation random_rotation(Rng& rng, double max_angle = 3.0) {
  return exp_so3(ball_vector(rng, max_angle));
}

inline Pose random_pose(Rng& rng, double max_angle = 3.0, double max_dist = 10.0) {
  return {random_rotation(rng, max_angle), ball_vector(rng, max_dist)};
}

inline Twist random_twist(Rng& rng, double max_w = 3.0, double max_v = 10.0) {
  return {ball_vector(rng, max_w), ball_vector(rng, max_v)};
}

/// Twist satisfying the nonholonomic constraint with forward speed in [lo, hi].
inline Twist random_nonholonomic(Rng& rng, double max_w = 1.0, double lo = 1.0, double hi = 10.0) {
  return {ball_vector(rng, max_w), Vec3(uniform(rng, lo, hi), 0.0, 0.0)};
}

inline EulerAngles random_angles(Rng& rng, double pitch_margin = 0.05) {
  const double half_pi = 0.5 * std::numbers::pi;
  return {uniform(rng, -std::numbers::pi + 1e-3, std::numbers::pi - 1e-3),
          uniform(rng, -half_pi + pitch_margin, half_pi - pitch_margin),
          uniform(rng, -std::numbers::pi + 1e-3, std::numbers::pi - 1e-3)};
}

/// 4x4 matrix exponential by scaling and squaring of a truncated Taylor
/// series; independent of the closed forms under test.
inline Mat4 expm_series(const Mat4& A) {
  int s = 0;
  double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    norm *= 0.5;
    ++s;
  }
  const Mat4 B = A / std::ldexp(1.0, s);
  Mat4 term = Mat4::Identity(), sum = Mat4::Identity();
  for (int k = 1; k <= 20; ++k) {
    term = term * B / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(RTIFORM_SCENARIO_DIR) / name;
}

}  // namespace rti::test
