// Receding-horizon controller built on the factor graph. Two graph shapes:
//
//  - nominal: the current state is pinned at the positioning output by a
//    near-zero-covariance anchor, and only the predicted trajectory and
//    inputs are solved;
//  - joint: the current state (and up to W-1 past states) carry positioning
//    factors and are estimated together with the plan, optionally chained by
//    relative-pose factors between consecutive past poses.
//
// Variables are keyed by absolute step index, which makes the warm start a
// plain carry-over of the previous solution with the fresh horizon tail
// duplicated from its predecessor.

#pragma once

#include <Eigen/Core>

#include <chrono>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "quadfg/control/config.hpp"
#include "quadfg/factors/control.hpp"
#include "quadfg/factors/measurement.hpp"
#include "quadfg/fgo/graph.hpp"
#include "quadfg/quad/allocation.hpp"
#include "quadfg/quad/params.hpp"

namespace quadfg::control {

struct BufferEntry {
  int index = 0;
  quad::QuadState measurement;
  std::optional<factors::RelPoseMeas> relative_pose;
};

struct StepDiagnostics {
  bool solver_converged = false;
  int iterations = 0;
  double final_error = 0.0;
  double solve_seconds = 0.0;
  bool used_fallback_input = false;
};

struct StepResult {
  quad::RotorSpeeds input;
  quad::QuadState estimate;
  StepDiagnostics diag;
};

class Controller {
 public:
  Controller(quad::QuadParams params, ControlConfig config, ControlMode mode)
      : params_(std::move(params)), config_(std::move(config)), mode_(mode) {
    params_.validate();
    config_.validate();
  }

  /// Runs one control step: ingest the measurement (and optional relative
  /// pose to the previous step), solve the graph, return the first input.
  /// On solver failure the previous input is held and the warm start is
  /// dropped so the next step starts cold.
  StepResult step(const quad::QuadState& measurement,
                  const std::optional<factors::RelPoseMeas>& relative_pose,
                  const std::vector<factors::RefPoint>& refs) {
    push_measurement(measurement, relative_pose);
    const fgo::FactorGraph graph = mode_ == ControlMode::NominalMpc
                                       ? build_nominal_graph(measurement, refs)
                                       : build_joint_graph(refs);

    const auto t0 = std::chrono::steady_clock::now();
    const fgo::SolveResult solved = graph.solve(config_.solver);
    const auto t1 = std::chrono::steady_clock::now();

    StepResult out;
    out.diag.solver_converged = solved.converged;
    out.diag.iterations = solved.iterations;
    out.diag.final_error = solved.final_error;
    out.diag.solve_seconds = std::chrono::duration<double>(t1 - t0).count();

    std::optional<quad::RotorSpeeds> input;
    if (solved.converged) {
      const auto& first_wrench = solved.values.at<quad::Wrench>(fgo::wrench_key(step_index_));
      input = quad::allocate_inverse(first_wrench, params_);
    }
    if (input.has_value()) {
      out.input = *input;
      out.estimate = solved.values.at<quad::QuadState>(fgo::state_key(step_index_));
      previous_solution_ = solved.values;
      last_input_ = *input;
    } else {
      out.input = last_input_.value_or(params_.hover_rotor_speeds());
      out.estimate = measurement;
      out.diag.used_fallback_input = true;
      previous_solution_.reset();  // re-cold-start on the next step
    }
    ++step_index_;
    return out;
  }

  /// Graph for the nominal mode: states x_i..x_{i+N} with x_i anchored at
  /// the estimate, plus the shared control factors.
  fgo::FactorGraph build_nominal_graph(const quad::QuadState& x0,
                                       const std::vector<factors::RefPoint>& refs) const {
    check_refs(refs);
    fgo::FactorGraph graph;
    add_horizon_variables(graph, step_index_, refs);
    graph.add_factor(std::make_shared<factors::PositioningFactor>(
        fgo::state_key(step_index_), x0,
        fgo::NoiseModel::isotropic(12, config_.anchor_sigma), "state_anchor"));
    add_control_factors(graph, refs);
    return graph;
  }

  /// Graph for the joint mode: the buffered states carry positioning factors
  /// (and relative-pose factors between consecutive past poses when
  /// available) instead of a hard pin.
  fgo::FactorGraph build_joint_graph(const std::vector<factors::RefPoint>& refs) const {
    check_refs(refs);
    if (buffer_.empty()) {
      throw std::invalid_argument("Controller: joint graph requires a non-empty window");
    }
    fgo::FactorGraph graph;
    for (const BufferEntry& entry : buffer_) {
      if (entry.index != step_index_) {
        graph.add_variable(fgo::state_key(entry.index),
                           initial_state(entry.index, refs));
      }
    }
    add_horizon_variables(graph, step_index_, refs);

    const fgo::NoiseModel positioning_noise =
        fgo::NoiseModel::from_sigmas(config_.positioning_sigmas);
    for (std::size_t bi = 0; bi < buffer_.size(); ++bi) {
      const BufferEntry& entry = buffer_[bi];
      graph.add_factor(std::make_shared<factors::PositioningFactor>(
          fgo::state_key(entry.index), entry.measurement, positioning_noise));
      if (bi > 0 && entry.relative_pose.has_value()) {
        graph.add_factor(std::make_shared<factors::RelativePoseFactor>(
            fgo::state_key(buffer_[bi - 1].index), fgo::state_key(entry.index),
            *entry.relative_pose));
      }
    }
    add_control_factors(graph, refs);
    return graph;
  }

  const std::deque<BufferEntry>& buffer() const { return buffer_; }
  int step_index() const { return step_index_; }
  ControlMode mode() const { return mode_; }
  const ControlConfig& config() const { return config_; }
  const quad::QuadParams& params() const { return params_; }
  const std::optional<fgo::Values>& previous_solution() const { return previous_solution_; }

 private:
  void check_refs(const std::vector<factors::RefPoint>& refs) const {
    if (static_cast<int>(refs.size()) != config_.horizon) {
      throw std::invalid_argument("Controller: need exactly horizon reference points");
    }
  }

  void push_measurement(const quad::QuadState& z,
                        const std::optional<factors::RelPoseMeas>& rel) {
    buffer_.push_back({step_index_, z, rel});
    while (static_cast<int>(buffer_.size()) > config_.window) {
      buffer_.pop_front();
    }
  }

  /// States x_i..x_{i+N}, wrenches and rotor speeds for the N steps.
  void add_horizon_variables(fgo::FactorGraph& graph, int i,
                             const std::vector<factors::RefPoint>& refs) const {
    for (int t = i; t <= i + config_.horizon; ++t) {
      graph.add_variable(fgo::state_key(t), initial_state(t, refs));
    }
    for (int t = i; t < i + config_.horizon; ++t) {
      graph.add_variable(fgo::wrench_key(t), initial_wrench(t));
      graph.add_variable(fgo::rotor_key(t), initial_rotor(t));
    }
  }

  void add_control_factors(fgo::FactorGraph& graph,
                           const std::vector<factors::RefPoint>& refs) const {
    const int i = step_index_;
    const int n = config_.horizon;
    const auto dynamics_noise = fgo::NoiseModel::isotropic(12, config_.dynamics_sigma);
    const auto running_noise = fgo::NoiseModel::from_sigmas(config_.running_ref_sigmas);
    const auto terminal_noise = fgo::NoiseModel::from_sigmas(config_.terminal_ref_sigmas);
    const auto rate_noise =
        fgo::NoiseModel::from_sigmas(config_.input_rate_cov.cwiseSqrt());
    const auto allocation_noise = fgo::NoiseModel::isotropic(4, config_.allocation_sigma);
    const auto limit_noise = fgo::NoiseModel::isotropic(4, config_.limit_sigma);

    for (int l = 0; l < n; ++l) {
      graph.add_factor(std::make_shared<factors::DynamicsFactor>(
          fgo::state_key(i + l), fgo::wrench_key(i + l), fgo::state_key(i + l + 1),
          config_.dt, params_, dynamics_noise));
    }
    for (int k = 1; k < n; ++k) {
      graph.add_factor(std::make_shared<factors::ReferenceFactor>(
          fgo::state_key(i + k), refs[k - 1], running_noise, "reference"));
    }
    graph.add_factor(std::make_shared<factors::ReferenceFactor>(
        fgo::state_key(i + n), refs[n - 1], terminal_noise, "terminal_reference"));
    for (int t = 0; t + 1 < n; ++t) {
      graph.add_factor(std::make_shared<factors::WrenchRateFactor>(
          fgo::wrench_key(i + t), fgo::wrench_key(i + t + 1), rate_noise));
    }
    for (int t = 0; t < n; ++t) {
      graph.add_factor(std::make_shared<factors::AllocationFactor>(
          fgo::wrench_key(i + t), fgo::rotor_key(i + t), params_, allocation_noise));
      graph.add_factor(std::make_shared<factors::RotorLimitFactor>(
          fgo::rotor_key(i + t), params_, limit_noise));
    }
  }

  // Warm start: reuse the previous solution where the key overlaps, duplicate
  // the predecessor for the fresh horizon tail, otherwise fall back to the
  // cold-start rules (measurements for past states, reference trajectory and
  // hover inputs for the prediction).
  quad::QuadState initial_state(int t, const std::vector<factors::RefPoint>& refs) const {
    for (int back = 0; back <= 1; ++back) {
      const fgo::Key key = fgo::state_key(t - back);
      if (previous_solution_ && previous_solution_->contains(key)) {
        return previous_solution_->at<quad::QuadState>(key);
      }
    }
    for (const BufferEntry& entry : buffer_) {
      if (entry.index == t) return entry.measurement;
    }
    const int k = t - step_index_;  // horizon offset
    const factors::RefPoint& ref =
        refs[std::clamp(k - 1, 0, static_cast<int>(refs.size()) - 1)];
    quad::QuadState x;
    x.position = ref.position;
    x.rotation = ref.rotation;
    x.velocity = ref.velocity;
    return x;
  }

  quad::Wrench initial_wrench(int t) const {
    for (int back = 0; back <= 1; ++back) {
      const fgo::Key key = fgo::wrench_key(t - back);
      if (previous_solution_ && previous_solution_->contains(key)) {
        return previous_solution_->at<quad::Wrench>(key);
      }
    }
    return params_.hover_wrench();
  }

  quad::RotorSpeeds initial_rotor(int t) const {
    for (int back = 0; back <= 1; ++back) {
      const fgo::Key key = fgo::rotor_key(t - back);
      if (previous_solution_ && previous_solution_->contains(key)) {
        return previous_solution_->at<quad::RotorSpeeds>(key);
      }
    }
    return params_.hover_rotor_speeds();
  }

  quad::QuadParams params_;
  ControlConfig config_;
  ControlMode mode_;
  std::deque<BufferEntry> buffer_;
  std::optional<fgo::Values> previous_solution_;
  std::optional<quad::RotorSpeeds> last_input_;
  int step_index_ = 0;
};

}  // namespace quadfg::control
