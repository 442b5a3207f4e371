// Rotation-group math: skew operator, exponential/logarithm maps and the
// right Jacobian of SO(3), with Taylor branches for small angles and a
// dedicated axis-extraction branch for angles near pi.
//
// Convention used throughout this library: perturbations multiply on the
// RIGHT, R <- R * Exp(delta), and all tangent-space quantities (residuals,
// Jacobians, retractions) follow that convention.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quadfg::so3 {

// Below this angle the closed-form coefficients divide ~0 by ~0; Taylor
// expansions take over.
inline constexpr double kSmallAngle = 1e-4;

// Above pi - kPiMargin the usual log formula loses the axis; switch to
// extracting it from the symmetric part of R.
inline constexpr double kPiMargin = 1e-4;

// Orthonormality tolerance accepted by log().
inline constexpr double kRotationTol = 1e-6;

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  // clang-format off
  m <<    0.0, -v.z(),  v.y(),
        v.z(),    0.0, -v.x(),
       -v.y(),  v.x(),    0.0;
  // clang-format on
  return m;
}

inline bool is_rotation(const Eigen::Matrix3d& R, double tol = kRotationTol) {
  const Eigen::Matrix3d err = R.transpose() * R - Eigen::Matrix3d::Identity();
  return err.cwiseAbs().maxCoeff() < tol && std::abs(R.determinant() - 1.0) < tol;
}

/// Rodrigues formula R = I + A*W + B*W^2 with W = skew(omega).
inline Eigen::Matrix3d exp(const Eigen::Vector3d& omega) {
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d W = skew(omega);
  double a;  // sin(theta)/theta
  double b;  // (1 - cos(theta))/theta^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    const double s_half = std::sin(0.5 * theta);
    b = 2.0 * s_half * s_half / theta2;
  }
  return Eigen::Matrix3d::Identity() + a * W + b * (W * W);
}

/// Inverse of exp(); returns the canonical axis-angle vector with |omega| <= pi.
/// Throws std::invalid_argument when R is not orthonormal with det +1.
inline Eigen::Vector3d log(const Eigen::Matrix3d& R) {
  if (!is_rotation(R)) {
    throw std::invalid_argument("so3::log: input is not a rotation matrix");
  }
  // w = 2 sin(theta) * axis
  const Eigen::Vector3d w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double cos_theta = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double sin_theta = std::min(0.5 * w.norm(), 1.0);
  const double theta = std::atan2(sin_theta, cos_theta);

  if (theta < kSmallAngle) {
    return 0.5 * (1.0 + theta * theta / 6.0) * w;
  }
  if (theta > std::numbers::pi - kPiMargin) {
    // Axis from the dominant column of n*n^T = (R + R^T - 2cos(theta) I) / (2(1-cos)).
    const Eigen::Matrix3d nnT =
        (R + R.transpose() - 2.0 * cos_theta * Eigen::Matrix3d::Identity()) /
        (2.0 * (1.0 - cos_theta));
    int j = 0;
    nnT.diagonal().maxCoeff(&j);
    Eigen::Vector3d n = nnT.col(j) / std::sqrt(nnT(j, j));
    // Fix the sign against w (w = 2 sin(theta) n); at exactly pi the sign is
    // free, so pick the representative with positive dominant component.
    const double align = n.dot(w);
    if (std::abs(align) > 1e-12) {
      if (align < 0.0) n = -n;
    } else if (n(j) < 0.0) {
      n = -n;
    }
    return theta * n;
  }
  return (0.5 * theta / sin_theta) * w;
}

/// Right Jacobian of the exponential map:
///   exp(omega + delta) ~= exp(omega) * exp(right_jacobian(omega) * delta).
inline Eigen::Matrix3d right_jacobian(const Eigen::Vector3d& omega) {
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d W = skew(omega);
  double c1;  // (1 - cos(theta))/theta^2
  double c2;  // (theta - sin(theta))/theta^3
  if (theta < kSmallAngle) {
    c1 = 0.5 - theta2 / 24.0;
    c2 = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    const double s_half = std::sin(0.5 * theta);
    c1 = 2.0 * s_half * s_half / theta2;
    c2 = (theta - std::sin(theta)) / (theta2 * theta);
  }
  return Eigen::Matrix3d::Identity() - c1 * W + c2 * (W * W);
}

/// Inverse of right_jacobian():
///   log(exp(omega) * exp(delta)) ~= omega + right_jacobian_inverse(omega) * delta.
inline Eigen::Matrix3d right_jacobian_inverse(const Eigen::Vector3d& omega) {
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Eigen::Matrix3d W = skew(omega);
  double c;  // 1/theta^2 - (1 + cos)/(2 theta sin) = 1/theta^2 - cot(theta/2)/(2 theta)
  if (theta < kSmallAngle) {
    c = 1.0 / 12.0 + theta2 / 720.0;
  } else {
    c = 1.0 / theta2 - 1.0 / (2.0 * theta * std::tan(0.5 * theta));
  }
  return Eigen::Matrix3d::Identity() + 0.5 * W + c * (W * W);
}

/// Nearest rotation in Frobenius norm (polar decomposition via SVD).
inline Eigen::Matrix3d project_to_rotation(const Eigen::Matrix3d& M) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d R = svd.matrixU() * svd.matrixV().transpose();
  if (R.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    R = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return R;
}

}  // namespace quadfg::so3
