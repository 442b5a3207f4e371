// Closed-loop scenario execution: measure, optionally synthesize a
// relative-pose measurement between consecutive true poses, run one
// controller step, then advance the ground truth. Deterministic for a fixed
// scenario and seed.

#pragma once

#include <optional>
#include <random>

#include "quadfg/control/controller.hpp"
#include "quadfg/harness/run_log.hpp"
#include "quadfg/harness/scenario.hpp"
#include "quadfg/quad/simulator.hpp"
#include "quadfg/traj/reference.hpp"

namespace quadfg::harness {

inline constexpr int kMaxConsecutiveFallbacks = 10;

inline RunLog run_scenario(const Scenario& scenario) {
  scenario.validate();
  const double dt = scenario.control.dt;
  const int steps = static_cast<int>(std::lround(scenario.duration / dt));
  const double gravity = scenario.params.gravity;

  std::mt19937_64 rng(scenario.seed);
  control::Controller controller(scenario.params, scenario.control, scenario.mode);

  quad::QuadState truth =
      traj::circle_state(scenario.circle, 0.0, scenario.attitude_rule, gravity);
  quad::QuadState previous_truth = truth;

  RunLog log;
  log.steps.reserve(steps);
  bool disturbance_applied = false;
  int consecutive_fallbacks = 0;

  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;

    if (scenario.disturbance && !disturbance_applied && t >= scenario.disturbance->time) {
      truth.position += scenario.disturbance->offset;
      disturbance_applied = true;
    }

    const quad::QuadState measured = quad::measure(truth, scenario.measurement_noise, rng);

    std::optional<factors::RelPoseMeas> rel;
    if (scenario.lidar.enabled && k > 0) {
      factors::RelPoseMeas m;
      m.from_index = k - 1;
      m.to_index = k;
      m.rotation = previous_truth.rotation.transpose() * truth.rotation;
      m.translation =
          previous_truth.rotation.transpose() * (truth.position - previous_truth.position);
      m.rotation = m.rotation * so3::exp(scenario.lidar.sigma * quad::gauss3(rng));
      m.translation += scenario.lidar.sigma * quad::gauss3(rng);
      m.covariance = factors::Matrix6d::Identity() * scenario.lidar.sigma * scenario.lidar.sigma;
      rel = m;
    }

    std::vector<factors::RefPoint> refs;
    refs.reserve(scenario.control.horizon);
    for (int j = 1; j <= scenario.control.horizon; ++j) {
      refs.push_back(
          traj::circle_ref(scenario.circle, t + j * dt, scenario.attitude_rule, gravity));
    }

    const control::StepResult res = controller.step(measured, rel, refs);

    StepRecord record;
    record.t = t;
    record.truth = truth;
    record.measured = measured;
    record.estimate = res.estimate;
    record.reference = traj::circle_ref(scenario.circle, t, scenario.attitude_rule, gravity);
    record.input = res.input.speeds;
    record.iterations = res.diag.iterations;
    record.solve_seconds = res.diag.solve_seconds;
    record.used_fallback = res.diag.used_fallback_input;
    log.steps.push_back(record);

    consecutive_fallbacks = res.diag.used_fallback_input ? consecutive_fallbacks + 1 : 0;
    if (consecutive_fallbacks >= kMaxConsecutiveFallbacks) {
      log.failed = true;
      log.failure_message = "controller diverged: " +
                            std::to_string(consecutive_fallbacks) +
                            " consecutive solver failures at t=" + std::to_string(t);
      return log;
    }

    previous_truth = truth;
    truth = quad::step_truth(truth, res.input, dt, scenario.process_noise, rng,
                             scenario.params);
    if (!truth.all_finite()) {
      log.failed = true;
      log.failure_message = "simulation state became non-finite at t=" + std::to_string(t);
      return log;
    }
  }
  return log;
}

}  // namespace quadfg::harness
