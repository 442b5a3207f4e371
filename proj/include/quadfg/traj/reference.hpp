// Analytic reference trajectories. The circle reference can carry either a
// dynamically consistent attitude (thrust direction from the centripetal
// acceleration, yaw along the velocity) or a level yaw-only attitude.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

#include "quadfg/factors/control.hpp"
#include "quadfg/quad/state.hpp"
#include "quadfg/so3.hpp"

namespace quadfg::traj {

using factors::RefPoint;

struct CircleSpec {
  double radius = 1.5;     // m
  double speed = 5.0;      // m/s along the arc
  Eigen::Vector3d center{0.0, 0.0, 1.0};
  Eigen::Vector3d normal{0.0, 0.0, 1.0};  // plane normal, unit

  void validate() const {
    if (radius <= 0.0 || speed < 0.0) {
      throw std::invalid_argument("CircleSpec: radius must be positive, speed non-negative");
    }
  }
};

enum class AttitudeRule {
  FlatnessConsistent,  // tilt so body z carries the centripetal + gravity load
  YawOnly,             // level attitude, heading along the velocity
};

namespace detail {

/// Deterministic in-plane orthonormal basis (e1, e2) for a given normal.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> plane_basis(const Eigen::Vector3d& normal) {
  const Eigen::Vector3d n = normal.normalized();
  const Eigen::Vector3d seed =
      std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = (seed - seed.dot(n) * n).normalized();
  return {e1, n.cross(e1)};
}

inline Eigen::Matrix3d attitude_from(const Eigen::Vector3d& velocity,
                                     const Eigen::Vector3d& acceleration,
                                     const Eigen::Vector3d& fallback_heading,
                                     AttitudeRule rule, double gravity) {
  const Eigen::Vector3d heading =
      velocity.norm() > 1e-12 ? velocity.normalized() : fallback_heading;
  if (rule == AttitudeRule::YawOnly) {
    const double yaw = std::atan2(heading.y(), heading.x());
    return so3::exp({0.0, 0.0, yaw});
  }
  const Eigen::Vector3d thrust = acceleration + gravity * Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d zb = thrust.norm() > 1e-12 ? thrust.normalized().eval()
                                                   : Eigen::Vector3d::UnitZ().eval();
  Eigen::Vector3d yb = zb.cross(heading);
  if (yb.norm() < 1e-12) {  // heading parallel to thrust; pick any consistent frame
    yb = zb.cross(Eigen::Vector3d::UnitX());
  }
  yb.normalize();
  const Eigen::Vector3d xb = yb.cross(zb);
  Eigen::Matrix3d R;
  R.col(0) = xb;
  R.col(1) = yb;
  R.col(2) = zb;
  return R;
}

}  // namespace detail

inline RefPoint circle_ref(const CircleSpec& spec, double t,
                           AttitudeRule rule = AttitudeRule::FlatnessConsistent,
                           double gravity = 10.0) {
  spec.validate();
  const auto [e1, e2] = detail::plane_basis(spec.normal);
  const double phase = spec.speed * t / spec.radius;
  const double c = std::cos(phase);
  const double s = std::sin(phase);

  RefPoint ref;
  ref.position = spec.center + spec.radius * (c * e1 + s * e2);
  ref.velocity = spec.speed * (-s * e1 + c * e2);
  const Eigen::Vector3d accel =
      -(spec.speed * spec.speed / spec.radius) * (c * e1 + s * e2);
  ref.rotation = detail::attitude_from(ref.velocity, accel, e2, rule, gravity);
  return ref;
}

inline RefPoint hover_ref(const Eigen::Vector3d& position) {
  RefPoint ref;
  ref.position = position;
  return ref;
}

/// Full state on the circle, including the steady-turn body rate; used to
/// initialize simulations on the reference.
inline quad::QuadState circle_state(const CircleSpec& spec, double t,
                                    AttitudeRule rule = AttitudeRule::FlatnessConsistent,
                                    double gravity = 10.0) {
  const RefPoint ref = circle_ref(spec, t, rule, gravity);
  quad::QuadState x;
  x.position = ref.position;
  x.rotation = ref.rotation;
  x.velocity = ref.velocity;
  const double turn_rate = spec.speed / spec.radius;
  x.body_rate = ref.rotation.transpose() * (turn_rate * spec.normal.normalized());
  return x;
}

}  // namespace quadfg::traj
