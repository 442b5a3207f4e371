#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "quadfg/control/config.hpp"
#include "quadfg/harness/config_file.hpp"
#include "quadfg/quad/params.hpp"
#include "quadfg/quad/simulator.hpp"
#include "quadfg/traj/reference.hpp"

namespace quadfg::harness {

struct Disturbance {
  double time = 0.0;                                   // s
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();    // instantaneous position jump, m
};

struct LidarSettings {
  bool enabled = false;
  double sigma = 0.001;  // per tangent component of the relative pose
};

/// Complete description of one closed-loop experiment.
struct Scenario {
  std::string name = "unnamed";
  control::ControlMode mode = control::ControlMode::NominalMpc;
  double duration = 10.0;  // s
  std::uint64_t seed = 1;

  traj::CircleSpec circle;
  traj::AttitudeRule attitude_rule = traj::AttitudeRule::FlatnessConsistent;

  quad::QuadParams params;
  quad::ProcessNoise process_noise;
  quad::MeasurementNoise measurement_noise;
  control::ControlConfig control;

  std::optional<Disturbance> disturbance;
  LidarSettings lidar;
  double rmse_exclude_seconds = 1.0;

  void validate() const {
    if (duration <= 0.0) throw std::invalid_argument("Scenario: duration must be positive");
    if (disturbance && disturbance->time >= duration) {
      throw std::invalid_argument("Scenario: disturbance time must precede the duration");
    }
    circle.validate();
    params.validate();
    control.validate();
  }
};

inline Scenario scenario_from_config(const ConfigFile& cfg) {
  Scenario s;
  s.name = cfg.get_string("scenario.name", s.name);
  s.duration = cfg.get_double("scenario.duration", s.duration);
  s.seed = static_cast<std::uint64_t>(cfg.get_int("scenario.seed", static_cast<int>(s.seed)));
  s.control.dt = cfg.get_double("scenario.dt", s.control.dt);

  const std::string mode = cfg.get_string("scenario.mode", "nominal-mpc");
  s.control.window = cfg.get_int("control.window", 10);
  if (mode == "nominal-mpc") {
    s.mode = control::ControlMode::NominalMpc;
    s.control.window = 1;
  } else if (mode == "jpcm-gi") {
    s.mode = control::ControlMode::JointMpc;
    s.control.window = 1;
  } else if (mode == "sw-jpcm") {
    s.mode = control::ControlMode::JointMpc;
  } else {
    throw std::runtime_error(cfg.origin() +
                             ": scenario.mode must be nominal-mpc, jpcm-gi or sw-jpcm");
  }

  s.circle.radius = cfg.get_double("traj.radius", s.circle.radius);
  s.circle.speed = cfg.get_double("traj.speed", s.circle.speed);
  s.circle.center = cfg.get_vec3("traj.center", s.circle.center);
  s.circle.normal = cfg.get_vec3("traj.normal", s.circle.normal).normalized();

  const std::string attitude = cfg.get_string("reference.attitude", "flat");
  if (attitude == "flat") {
    s.attitude_rule = traj::AttitudeRule::FlatnessConsistent;
  } else if (attitude == "yaw-only") {
    s.attitude_rule = traj::AttitudeRule::YawOnly;
  } else {
    throw std::runtime_error(cfg.origin() + ": reference.attitude must be flat or yaw-only");
  }

  s.params.mass = cfg.get_double("quad.mass", s.params.mass);
  s.params.gravity = cfg.get_double("quad.gravity", s.params.gravity);
  s.params.inertia = cfg.get_vec3("quad.inertia", s.params.inertia);
  s.params.arm_length = cfg.get_double("quad.arm_length", s.params.arm_length);
  s.params.thrust_coeff = cfg.get_double("quad.thrust_coeff", s.params.thrust_coeff);
  s.params.moment_coeff = cfg.get_double("quad.moment_coeff", s.params.moment_coeff);
  s.params.rotor_min = cfg.get_double("quad.rotor_min", s.params.rotor_min);
  s.params.rotor_max = cfg.get_double("quad.rotor_max", s.params.rotor_max);
  s.params.rotor_threshold = cfg.get_double("quad.rotor_threshold", s.params.rotor_threshold);

  s.process_noise.thrust_sigma = cfg.get_double("sim.thrust_sigma", 0.0);
  s.process_noise.rate_sigma = cfg.get_double("sim.rate_sigma", 0.0);

  s.measurement_noise.pos_sigma = cfg.get_double("meas.pos_sigma", 0.0);
  s.measurement_noise.rot_sigma = cfg.get_double("meas.rot_sigma", 0.0);
  s.measurement_noise.vel_sigma = cfg.get_double("meas.vel_sigma", 0.0);
  s.measurement_noise.rate_sigma = cfg.get_double("meas.rate_sigma", 0.0);

  s.control.horizon = cfg.get_int("control.horizon", s.control.horizon);
  s.control.running_ref_sigmas =
      cfg.get_vector("control.running_ref_sigmas", s.control.running_ref_sigmas);
  s.control.terminal_ref_sigmas =
      cfg.get_vector("control.terminal_ref_sigmas", s.control.terminal_ref_sigmas);
  s.control.input_rate_cov = cfg.get_vector("control.input_rate_cov", s.control.input_rate_cov);
  s.control.dynamics_sigma = cfg.get_double("control.dynamics_sigma", s.control.dynamics_sigma);
  s.control.allocation_sigma =
      cfg.get_double("control.allocation_sigma", s.control.allocation_sigma);
  s.control.limit_sigma = cfg.get_double("control.limit_sigma", s.control.limit_sigma);
  s.control.anchor_sigma = cfg.get_double("control.anchor_sigma", s.control.anchor_sigma);

  // The positioning factor trusts the sensor as much as the sensor is noisy,
  // unless the config overrides the sigmas explicitly.
  Eigen::Matrix<double, 12, 1> pos_sigmas;
  const auto floor_sigma = [](double v) { return std::max(v, 1e-6); };
  pos_sigmas.segment<3>(0).setConstant(floor_sigma(s.measurement_noise.pos_sigma));
  pos_sigmas.segment<3>(3).setConstant(floor_sigma(s.measurement_noise.rot_sigma));
  pos_sigmas.segment<3>(6).setConstant(floor_sigma(s.measurement_noise.vel_sigma));
  pos_sigmas.segment<3>(9).setConstant(floor_sigma(s.measurement_noise.rate_sigma));
  s.control.positioning_sigmas =
      cfg.get_vector("control.positioning_sigmas", pos_sigmas);

  s.control.solver.max_iterations =
      cfg.get_int("solver.max_iterations", s.control.solver.max_iterations);
  s.control.solver.lambda_init =
      cfg.get_double("solver.lambda_init", s.control.solver.lambda_init);
  s.control.solver.lambda_scale =
      cfg.get_double("solver.lambda_scale", s.control.solver.lambda_scale);
  s.control.solver.abs_tol = cfg.get_double("solver.abs_tol", s.control.solver.abs_tol);
  s.control.solver.rel_tol = cfg.get_double("solver.rel_tol", s.control.solver.rel_tol);

  if (cfg.has("disturbance.time")) {
    Disturbance d;
    d.time = cfg.get_double("disturbance.time", 0.0);
    d.offset = cfg.get_vec3("disturbance.offset", Eigen::Vector3d::Zero());
    s.disturbance = d;
  }

  s.lidar.enabled = cfg.get_bool("lidar.enabled", false);
  s.lidar.sigma = cfg.get_double("lidar.sigma", s.lidar.sigma);

  s.rmse_exclude_seconds = cfg.get_double("rmse.exclude_seconds", s.rmse_exclude_seconds);

  cfg.require_fully_consumed();
  s.validate();
  return s;
}

}  // namespace quadfg::harness
