#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

#include "quadfg/quad/state.hpp"

namespace quadfg::quad {

/// Physical and actuator parameters of a quadrotor. Rotor speeds are kept in
/// abstract units; thrust_coeff and moment_coeff are expressed per
/// rotor-speed^2 so that thrust = thrust_coeff * sum(u_j^2).
struct QuadParams {
  double mass = 1.0;                                    // kg
  Eigen::Vector3d inertia{0.01, 0.01, 0.02};            // kg*m^2, diagonal
  double arm_length = 0.25;                             // m
  double thrust_coeff = 1e-5;                           // N per speed^2
  double moment_coeff = 1e-7;                           // N*m per speed^2
  double gravity = 10.0;                                // m/s^2
  double rotor_min = 200.0;                             // speed units
  double rotor_max = 800.0;
  double rotor_threshold = 50.0;                        // soft-limit band

  double hover_rotor_speed() const {
    return std::sqrt(mass * gravity / (4.0 * thrust_coeff));
  }

  Wrench hover_wrench() const { return {mass * gravity, Eigen::Vector3d::Zero()}; }

  RotorSpeeds hover_rotor_speeds() const {
    return {Eigen::Vector4d::Constant(hover_rotor_speed())};
  }

  /// Reduced 4x4 allocation matrix mapping per-rotor squared speeds A_j to
  /// (T_z, M_x, M_y, M_z). Rotors 0/1 sit on the body y arm, 2/3 on x.
  Eigen::Matrix4d allocation_matrix() const {
    const double ct = thrust_coeff;
    const double lct = arm_length * thrust_coeff;
    const double km = moment_coeff;
    Eigen::Matrix4d m;
    // clang-format off
    m <<   ct,   ct,   ct,   ct,
          0.0,  0.0,  lct, -lct,
         -lct,  lct,  0.0,  0.0,
           km,   km,  -km,  -km;
    // clang-format on
    return m;
  }

  void validate() const {
    if (mass <= 0.0 || gravity <= 0.0 || arm_length <= 0.0 || thrust_coeff <= 0.0 ||
        moment_coeff <= 0.0 || inertia.minCoeff() <= 0.0) {
      throw std::invalid_argument("QuadParams: all physical parameters must be positive");
    }
    if (rotor_min <= 0.0 || rotor_threshold < 0.0 ||
        rotor_min + rotor_threshold >= rotor_max - rotor_threshold) {
      throw std::invalid_argument(
          "QuadParams: rotor bounds must satisfy min + threshold < max - threshold");
    }
  }
};

}  // namespace quadfg::quad
