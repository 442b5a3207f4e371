// Control-side factors: discrete dynamics, reference tracking, control
// allocation, rotor soft limits and wrench-rate smoothing.

#pragma once

#include <Eigen/Core>

#include <memory>
#include <utility>

#include "quadfg/fgo/factor.hpp"
#include "quadfg/quad/allocation.hpp"
#include "quadfg/quad/params.hpp"
#include "quadfg/quad/state.hpp"
#include "quadfg/so3.hpp"

namespace quadfg::factors {

using Vector9d = Eigen::Matrix<double, 9, 1>;
using Vector12d = Eigen::Matrix<double, 12, 1>;

/// One sample of the reference trajectory.
struct RefPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

/// Euler-discretized rigid-body dynamics between two states and the wrench
/// acting over the interval. Residual order matches the state tangent:
///   e_p = p1 - v0 dt - p0
///   e_th = Log(R1^T R0 Exp(w0 dt))
///   e_v = v1 - v0 - (-g e3 + R0 (0,0,T)/m) dt
///   e_w = w1 - w0 - I^-1 (M - w0 x I w0) dt
class DynamicsFactor : public fgo::Factor {
 public:
  DynamicsFactor(fgo::Key state_i, fgo::Key wrench_i, fgo::Key state_next,
                 double dt, quad::QuadParams params, fgo::NoiseModel noise)
      : Factor({state_i, wrench_i, state_next}, std::move(noise), "dynamics"),
        dt_(dt),
        params_(std::move(params)) {}

  Eigen::VectorXd residual(const fgo::Values& values) const override {
    const auto& x0 = values.at<quad::QuadState>(keys()[0]);
    const auto& w = values.at<quad::Wrench>(keys()[1]);
    const auto& x1 = values.at<quad::QuadState>(keys()[2]);

    Vector12d r;
    r.segment<3>(0) = x1.position - x0.velocity * dt_ - x0.position;
    r.segment<3>(3) =
        so3::log(x1.rotation.transpose() * x0.rotation * so3::exp(x0.body_rate * dt_));
    r.segment<3>(6) = x1.velocity - x0.velocity -
                      (Eigen::Vector3d(0.0, 0.0, -params_.gravity) +
                       x0.rotation * Eigen::Vector3d(0.0, 0.0, w.thrust) / params_.mass) *
                          dt_;
    const Eigen::Vector3d inertia_rate = params_.inertia.cwiseProduct(x0.body_rate);
    r.segment<3>(9) =
        x1.body_rate - x0.body_rate -
        (w.moment - x0.body_rate.cross(inertia_rate)).cwiseQuotient(params_.inertia) * dt_;
    return r;
  }

  void jacobians(const fgo::Values& values, std::vector<Eigen::MatrixXd>& J) const override {
    const auto& x0 = values.at<quad::QuadState>(keys()[0]);
    const auto& w = values.at<quad::Wrench>(keys()[1]);
    const auto& x1 = values.at<quad::QuadState>(keys()[2]);

    const Eigen::Matrix3d I3 = Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d rate_exp = so3::exp(x0.body_rate * dt_);
    const Eigen::Matrix3d err_exp = x1.rotation.transpose() * x0.rotation * rate_exp;
    const Eigen::Vector3d e_rot = so3::log(err_exp);
    const Eigen::Matrix3d jr_inv = so3::right_jacobian_inverse(e_rot);

    J.assign(3, Eigen::MatrixXd::Zero(12, 12));
    J[1] = Eigen::MatrixXd::Zero(12, 4);

    // d/dx0
    J[0].block<3, 3>(0, 0) = -I3;
    J[0].block<3, 3>(0, 6) = -dt_ * I3;
    J[0].block<3, 3>(3, 3) = jr_inv * rate_exp.transpose();
    J[0].block<3, 3>(3, 9) = jr_inv * so3::right_jacobian(x0.body_rate * dt_) * dt_;
    J[0].block<3, 3>(6, 3) =
        (dt_ / params_.mass) * x0.rotation * so3::skew({0.0, 0.0, w.thrust});
    J[0].block<3, 3>(6, 6) = -I3;
    J[0].block<3, 3>(9, 9) = -I3 + body_rate_coupling(x0.body_rate) * dt_;

    // d/dwrench
    J[1].block<3, 1>(6, 0) = -(dt_ / params_.mass) * x0.rotation.col(2);
    J[1].block<3, 3>(9, 1) = -dt_ * params_.inertia.cwiseInverse().asDiagonal();

    // d/dx1
    J[2].block<3, 3>(0, 0) = I3;
    J[2].block<3, 3>(3, 3) = -jr_inv * err_exp.transpose();
    J[2].block<3, 3>(6, 6) = I3;
    J[2].block<3, 3>(9, 9) = I3;
  }

  /// Derivative of I^-1 (w x I w) with respect to w, written with the
  /// per-axis inertia-difference coefficients.
  Eigen::Matrix3d body_rate_coupling(const Eigen::Vector3d& rate) const {
    const double a = (params_.inertia.z() - params_.inertia.y()) / params_.inertia.x();
    const double b = (params_.inertia.x() - params_.inertia.z()) / params_.inertia.y();
    const double c = (params_.inertia.y() - params_.inertia.x()) / params_.inertia.z();
    Eigen::Matrix3d m;
    // clang-format off
    m <<            0.0, a * rate.z(), a * rate.y(),
         b * rate.z(),            0.0, b * rate.x(),
         c * rate.y(), c * rate.x(),            0.0;
    // clang-format on
    return m;
  }

  double dt() const { return dt_; }

 private:
  double dt_;
  quad::QuadParams params_;
};

/// Tracking residual against a reference point, ordered (p, rotation, v)
/// with the rotation error in right-tangent coordinates Log(R_r^T R).
class ReferenceFactor : public fgo::Factor {
 public:
  ReferenceFactor(fgo::Key state, RefPoint ref, fgo::NoiseModel noise,
                  std::string name = "reference")
      : Factor({state}, std::move(noise), std::move(name)), ref_(std::move(ref)) {}

  Eigen::VectorXd residual(const fgo::Values& values) const override {
    const auto& x = values.at<quad::QuadState>(keys()[0]);
    Vector9d r;
    r.segment<3>(0) = x.position - ref_.position;
    r.segment<3>(3) = so3::log(ref_.rotation.transpose() * x.rotation);
    r.segment<3>(6) = x.velocity - ref_.velocity;
    return r;
  }

  void jacobians(const fgo::Values& values, std::vector<Eigen::MatrixXd>& J) const override {
    const auto& x = values.at<quad::QuadState>(keys()[0]);
    const Eigen::Vector3d e_rot = so3::log(ref_.rotation.transpose() * x.rotation);
    J.assign(1, Eigen::MatrixXd::Zero(9, 12));
    J[0].block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();
    J[0].block<3, 3>(3, 3) = so3::right_jacobian_inverse(e_rot);
    J[0].block<3, 3>(6, 6) = Eigen::Matrix3d::Identity();
  }

  const RefPoint& reference() const { return ref_; }

 private:
  RefPoint ref_;
};

/// Ties a wrench variable to the rotor speeds that generate it:
/// residual = (T, M) - allocation(u).
class AllocationFactor : public fgo::Factor {
 public:
  AllocationFactor(fgo::Key wrench, fgo::Key rotor, quad::QuadParams params,
                   fgo::NoiseModel noise)
      : Factor({wrench, rotor}, std::move(noise), "allocation"),
        params_(std::move(params)) {}

  Eigen::VectorXd residual(const fgo::Values& values) const override {
    const auto& w = values.at<quad::Wrench>(keys()[0]);
    const auto& u = values.at<quad::RotorSpeeds>(keys()[1]);
    return w.vec() - quad::allocate(u, params_).vec();
  }

  void jacobians(const fgo::Values& values, std::vector<Eigen::MatrixXd>& J) const override {
    const auto& u = values.at<quad::RotorSpeeds>(keys()[1]);
    J.assign(2, Eigen::MatrixXd::Identity(4, 4));
    J[1] = -params_.allocation_matrix() * (2.0 * u.speeds).asDiagonal();
  }

 private:
  quad::QuadParams params_;
};

/// Soft actuator bound: per-rotor hinge that activates within `threshold` of
/// either speed limit and is zero in the interior.
class RotorLimitFactor : public fgo::Factor {
 public:
  RotorLimitFactor(fgo::Key rotor, quad::QuadParams params, fgo::NoiseModel noise)
      : Factor({rotor}, std::move(noise), "rotor_limit"), params_(std::move(params)) {}

  Eigen::VectorXd residual(const fgo::Values& values) const override {
    const auto& u = values.at<quad::RotorSpeeds>(keys()[0]);
    const double lo = params_.rotor_min + params_.rotor_threshold;
    const double hi = params_.rotor_max - params_.rotor_threshold;
    Eigen::Vector4d r = Eigen::Vector4d::Zero();
    for (int j = 0; j < 4; ++j) {
      const double uj = u.speeds(j);
      if (uj < lo) {
        r(j) = lo - uj;
      } else if (uj >= hi) {
        r(j) = uj - hi;
      }
    }
    return r;
  }

  void jacobians(const fgo::Values& values, std::vector<Eigen::MatrixXd>& J) const override {
    const auto& u = values.at<quad::RotorSpeeds>(keys()[0]);
    const double lo = params_.rotor_min + params_.rotor_threshold;
    const double hi = params_.rotor_max - params_.rotor_threshold;
    J.assign(1, Eigen::MatrixXd::Zero(4, 4));
    for (int j = 0; j < 4; ++j) {
      const double uj = u.speeds(j);
      if (uj < lo) {
        J[0](j, j) = -1.0;
      } else if (uj >= hi) {
        J[0](j, j) = 1.0;
      }
    }
  }

 private:
  quad::QuadParams params_;
};

/// Rate-of-change penalty between consecutive wrench variables.
class WrenchRateFactor : public fgo::Factor {
 public:
  WrenchRateFactor(fgo::Key wrench_t, fgo::Key wrench_next, fgo::NoiseModel noise)
      : Factor({wrench_t, wrench_next}, std::move(noise), "wrench_rate") {}

  Eigen::VectorXd residual(const fgo::Values& values) const override {
    return values.at<quad::Wrench>(keys()[0]).vec() -
           values.at<quad::Wrench>(keys()[1]).vec();
  }

  void jacobians(const fgo::Values&, std::vector<Eigen::MatrixXd>& J) const override {
    J.assign(2, Eigen::MatrixXd::Identity(4, 4));
    J[1] = -Eigen::MatrixXd::Identity(4, 4);
  }
};

}  // namespace quadfg::factors
