#pragma once

#include <Eigen/Core>

#include <stdexcept>

#include "quadfg/fgo/graph.hpp"

namespace quadfg::control {

enum class ControlMode {
  NominalMpc,  // current state enters as a hard anchor at the measured value
  JointMpc,    // current (and windowed past) states estimated jointly
};

/// Weights and horizon configuration for the receding-horizon graphs. All
/// noise quantities are user-facing covariances or sigmas; the factors
/// convert them to square-root information once.
struct ControlConfig {
  int horizon = 20;  // N predicted steps
  int window = 1;    // W estimated past/current states (joint mode)
  double dt = 0.01;  // s

  // Running and terminal reference sigmas, ordered (position, rotation, velocity).
  Eigen::Matrix<double, 9, 1> running_ref_sigmas =
      (Eigen::Matrix<double, 9, 1>() << 0.03, 0.03, 0.03, 0.3, 0.3, 0.3, 3.0, 3.0, 3.0)
          .finished();
  Eigen::Matrix<double, 9, 1> terminal_ref_sigmas =
      (Eigen::Matrix<double, 9, 1>() << 0.005, 0.005, 0.005, 0.3, 0.3, 0.3, 3.0, 3.0, 3.0)
          .finished();

  // Covariance diagonal of the wrench-rate factor, (T, Mx, My, Mz).
  Eigen::Vector4d input_rate_cov{1.0, 0.5, 0.5, 0.5};

  // Positioning factor sigmas, ordered (position, rotation, velocity, rate).
  Eigen::Matrix<double, 12, 1> positioning_sigmas =
      (Eigen::Matrix<double, 12, 1>() << 0.20, 0.20, 0.20, 0.05, 0.05, 0.05, 0.01, 0.01,
       0.01, 0.001, 0.001, 0.001)
          .finished();

  double dynamics_sigma = 1e-4;    // per component of the 12-dim dynamics residual
  double allocation_sigma = 1e-4;  // wrench-to-rotor consistency
  double limit_sigma = 10.0;       // rotor soft-limit growth rate
  double anchor_sigma = 1e-4;      // nominal-mode hard pin (covariance 1e-8)

  fgo::LmConfig solver;

  void validate() const {
    if (horizon < 1 || window < 1 || dt <= 0.0) {
      throw std::invalid_argument("ControlConfig: horizon, window >= 1 and dt > 0 required");
    }
    if (running_ref_sigmas.minCoeff() <= 0.0 || terminal_ref_sigmas.minCoeff() <= 0.0 ||
        input_rate_cov.minCoeff() <= 0.0 || positioning_sigmas.minCoeff() <= 0.0 ||
        dynamics_sigma <= 0.0 || allocation_sigma <= 0.0 || limit_sigma <= 0.0 ||
        anchor_sigma <= 0.0) {
      throw std::invalid_argument("ControlConfig: all sigmas/covariances must be positive");
    }
  }
};

}  // namespace quadfg::control
