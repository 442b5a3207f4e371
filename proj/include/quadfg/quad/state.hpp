#pragma once

#include <Eigen/Core>

#include "quadfg/so3.hpp"

namespace quadfg::quad {

/// Full kinematic state of the vehicle. The tangent space is 12-dimensional,
/// ordered (position, rotation, velocity, body rate); the rotation block uses
/// right perturbation, R <- R * Exp(delta_theta).
struct QuadState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d body_rate = Eigen::Vector3d::Zero();

  static constexpr int kTangentDim = 12;

  QuadState retracted(const Eigen::Matrix<double, 12, 1>& delta) const {
    QuadState out;
    out.position = position + delta.segment<3>(0);
    out.rotation = rotation * so3::exp(delta.segment<3>(3));
    out.velocity = velocity + delta.segment<3>(6);
    out.body_rate = body_rate + delta.segment<3>(9);
    return out;
  }

  bool all_finite() const {
    return position.allFinite() && rotation.allFinite() && velocity.allFinite() &&
           body_rate.allFinite();
  }
};

/// Collective body-z thrust plus the three body moments. A quadrotor cannot
/// produce x/y thrust, so the thrust component is the scalar along body z.
struct Wrench {
  double thrust = 0.0;                             // N, along body z
  Eigen::Vector3d moment = Eigen::Vector3d::Zero(); // N*m, body frame

  static constexpr int kTangentDim = 4;

  Eigen::Vector4d vec() const {
    return {thrust, moment.x(), moment.y(), moment.z()};
  }
  static Wrench from_vec(const Eigen::Vector4d& v) {
    return {v(0), {v(1), v(2), v(3)}};
  }
  Wrench retracted(const Eigen::Vector4d& delta) const {
    return from_vec(vec() + delta);
  }
};

/// Angular speeds of the four rotors, in abstract rotor-speed units
/// consistent with the thrust/moment coefficients.
struct RotorSpeeds {
  Eigen::Vector4d speeds = Eigen::Vector4d::Zero();

  static constexpr int kTangentDim = 4;

  RotorSpeeds retracted(const Eigen::Vector4d& delta) const {
    return {speeds + delta};
  }
};

}  // namespace quadfg::quad
