// Control allocation: quadratic rotor model A_j = u_j^2 mapped through the
// geometry matrix to collective thrust and body moments, plus the inverse
// used for warm starts and input extraction.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>

#include "quadfg/quad/params.hpp"
#include "quadfg/quad/state.hpp"

namespace quadfg::quad {

inline Wrench allocate(const RotorSpeeds& u, const QuadParams& params) {
  const Eigen::Vector4d a = u.speeds.cwiseProduct(u.speeds);
  return Wrench::from_vec(params.allocation_matrix() * a);
}

/// Inverts allocate(). Returns nullopt when the wrench would require a
/// negative squared rotor speed.
inline std::optional<RotorSpeeds> allocate_inverse(const Wrench& w, const QuadParams& params) {
  const double s = w.thrust / params.thrust_coeff;                     // A0+A1+A2+A3
  const double dx = w.moment.x() / (params.arm_length * params.thrust_coeff);  // A2-A3
  const double dy = w.moment.y() / (params.arm_length * params.thrust_coeff);  // A1-A0
  const double dz = w.moment.z() / params.moment_coeff;                // A0+A1-A2-A3

  Eigen::Vector4d a;
  a(0) = 0.5 * (0.5 * (s + dz) - dy);
  a(1) = 0.5 * (0.5 * (s + dz) + dy);
  a(2) = 0.5 * (0.5 * (s - dz) + dx);
  a(3) = 0.5 * (0.5 * (s - dz) - dx);
  if (a.minCoeff() < 0.0) {
    return std::nullopt;
  }
  return RotorSpeeds{a.cwiseSqrt()};
}

}  // namespace quadfg::quad
