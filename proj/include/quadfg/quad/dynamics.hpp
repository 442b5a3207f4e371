// Rigid-body quadrotor dynamics:
//   p_dot = v
//   R_dot = R * skew(omega)        (consumed as a body-rate tangent)
//   v_dot = -g e3 + R (0,0,T)^T / m
//   omega_dot = I^-1 (M - omega x I omega)

#pragma once

#include <Eigen/Core>

#include "quadfg/quad/params.hpp"
#include "quadfg/quad/state.hpp"
#include "quadfg/so3.hpp"

namespace quadfg::quad {

using StateDerivative = Eigen::Matrix<double, 12, 1>;  // (p_dot, omega, v_dot, omega_dot)

inline StateDerivative continuous_dynamics(const QuadState& x, const Wrench& w,
                                           const QuadParams& params) {
  StateDerivative d;
  d.segment<3>(0) = x.velocity;
  d.segment<3>(3) = x.body_rate;
  d.segment<3>(6) = Eigen::Vector3d(0.0, 0.0, -params.gravity) +
                    x.rotation * Eigen::Vector3d(0.0, 0.0, w.thrust) / params.mass;
  const Eigen::Vector3d inertia_rate = params.inertia.cwiseProduct(x.body_rate);
  d.segment<3>(9) =
      (w.moment - x.body_rate.cross(inertia_rate)).cwiseQuotient(params.inertia);
  return d;
}

/// One RK4 step with a fixed wrench; stage states are formed by retraction so
/// the rotation stays on the group, and the result is re-orthonormalized.
inline QuadState integrate_rk4(const QuadState& x, const Wrench& w, double dt,
                               const QuadParams& params) {
  const StateDerivative k1 = continuous_dynamics(x, w, params);
  const StateDerivative k2 = continuous_dynamics(x.retracted(0.5 * dt * k1), w, params);
  const StateDerivative k3 = continuous_dynamics(x.retracted(0.5 * dt * k2), w, params);
  const StateDerivative k4 = continuous_dynamics(x.retracted(dt * k3), w, params);
  QuadState next = x.retracted(dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  next.rotation = so3::project_to_rotation(next.rotation);
  return next;
}

/// One explicit Euler step with the group-consistent rotation update
/// R_{i+1} = R_i Exp(omega dt). This is the discrete model the dynamics
/// factor penalizes deviations from.
inline QuadState integrate_euler(const QuadState& x, const Wrench& w, double dt,
                                 const QuadParams& params) {
  const StateDerivative d = continuous_dynamics(x, w, params);
  QuadState next;
  next.position = x.position + dt * d.segment<3>(0);
  next.rotation = x.rotation * so3::exp(dt * x.body_rate);
  next.velocity = x.velocity + dt * d.segment<3>(6);
  next.body_rate = x.body_rate + dt * d.segment<3>(9);
  return next;
}

}  // namespace quadfg::quad
