// Measurement factors: the full-state positioning factor and the
// relative-pose (scan-matching style) between factor.

#pragma once

#include <Eigen/Core>

#include <memory>
#include <utility>

#include "quadfg/fgo/factor.hpp"
#include "quadfg/quad/state.hpp"
#include "quadfg/so3.hpp"

namespace quadfg::factors {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Vector12d = Eigen::Matrix<double, 12, 1>;

/// Residual between a state variable and a direct state measurement:
/// (p - p_m, Log(R_m^T R), v - v_m, w - w_m). Also serves as a prior when
/// the "measurement" is a fixed anchor value.
class PositioningFactor : public fgo::Factor {
 public:
  PositioningFactor(fgo::Key state, quad::QuadState measured, fgo::NoiseModel noise,
                    std::string name = "positioning")
      : Factor({state}, std::move(noise), std::move(name)), measured_(std::move(measured)) {}

  Eigen::VectorXd residual(const fgo::Values& values) const override {
    const auto& x = values.at<quad::QuadState>(keys()[0]);
    Vector12d r;
    r.segment<3>(0) = x.position - measured_.position;
    r.segment<3>(3) = so3::log(measured_.rotation.transpose() * x.rotation);
    r.segment<3>(6) = x.velocity - measured_.velocity;
    r.segment<3>(9) = x.body_rate - measured_.body_rate;
    return r;
  }

  void jacobians(const fgo::Values& values, std::vector<Eigen::MatrixXd>& J) const override {
    const auto& x = values.at<quad::QuadState>(keys()[0]);
    const Eigen::Vector3d e_rot = so3::log(measured_.rotation.transpose() * x.rotation);
    J.assign(1, Eigen::MatrixXd::Identity(12, 12));
    J[0].block<3, 3>(3, 3) = so3::right_jacobian_inverse(e_rot);
  }

  const quad::QuadState& measured() const { return measured_; }

 private:
  quad::QuadState measured_;
};

/// Relative pose between two sensor frames, with the sensor mounted on the
/// body through a fixed extrinsic transform (identity by default).
struct RelPoseMeas {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();     // R of T^{Li}_{Lj}
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();      // t of T^{Li}_{Lj}
  Matrix6d covariance = Matrix6d::Identity();                 // (rot, trans) order
  std::int32_t from_index = 0;                                // i
  std::int32_t to_index = 0;                                  // j, must be > i
  Eigen::Matrix3d extrinsic_rotation = Eigen::Matrix3d::Identity();   // body -> sensor
  Eigen::Vector3d extrinsic_translation = Eigen::Vector3d::Zero();
};

/// Residual of the measured relative transform against the two body poses:
/// the (rotation tangent, translation) coordinates of
///   T_meas * (T^w_{Lj})^-1 * T^w_{Li},
/// which vanish exactly when the measurement explains the pose pair.
class RelativePoseFactor : public fgo::Factor {
 public:
  RelativePoseFactor(fgo::Key state_i, fgo::Key state_j, RelPoseMeas meas,
                     std::string name = "relative_pose")
      : Factor({state_i, state_j}, fgo::NoiseModel::from_covariance(meas.covariance),
               std::move(name)),
        meas_(std::move(meas)) {}

  Eigen::VectorXd residual(const fgo::Values& values) const override {
    const auto& xi = values.at<quad::QuadState>(keys()[0]);
    const auto& xj = values.at<quad::QuadState>(keys()[1]);
    const auto [R_li, t_li] = sensor_pose(xi);
    const auto [R_lj, t_lj] = sensor_pose(xj);
    Vector6d r;
    r.segment<3>(0) = so3::log(meas_.rotation * R_lj.transpose() * R_li);
    r.segment<3>(3) = meas_.rotation * R_lj.transpose() * (t_li - t_lj) + meas_.translation;
    return r;
  }

  void jacobians(const fgo::Values& values, std::vector<Eigen::MatrixXd>& J) const override {
    const auto& xi = values.at<quad::QuadState>(keys()[0]);
    const auto& xj = values.at<quad::QuadState>(keys()[1]);
    const auto [R_li, t_li] = sensor_pose(xi);
    const auto [R_lj, t_lj] = sensor_pose(xj);
    const Eigen::Matrix3d& R_e = meas_.extrinsic_rotation;
    const Eigen::Vector3d& t_e = meas_.extrinsic_translation;
    const Eigen::Vector3d e_rot = so3::log(meas_.rotation * R_lj.transpose() * R_li);
    const Eigen::Matrix3d jr_inv = so3::right_jacobian_inverse(e_rot);
    const Eigen::Matrix3d R_m_ljT = meas_.rotation * R_lj.transpose();

    J.assign(2, Eigen::MatrixXd::Zero(6, 12));
    // Body i: rotation and position columns.
    J[0].block<3, 3>(0, 3) = jr_inv * R_e.transpose();
    J[0].block<3, 3>(3, 0) = R_m_ljT;
    J[0].block<3, 3>(3, 3) = -R_m_ljT * xi.rotation * so3::skew(t_e);
    // Body j.
    J[1].block<3, 3>(0, 3) = -jr_inv * R_li.transpose() * xj.rotation;
    J[1].block<3, 3>(3, 0) = -R_m_ljT;
    J[1].block<3, 3>(3, 3) = meas_.rotation * R_e.transpose() *
                             (so3::skew(xj.rotation.transpose() * (t_li - t_lj)) +
                              so3::skew(t_e));
  }

  const RelPoseMeas& measurement() const { return meas_; }

 private:
  std::pair<Eigen::Matrix3d, Eigen::Vector3d> sensor_pose(const quad::QuadState& x) const {
    return {x.rotation * meas_.extrinsic_rotation,
            x.rotation * meas_.extrinsic_translation + x.position};
  }

  RelPoseMeas meas_;
};

}  // namespace quadfg::factors
