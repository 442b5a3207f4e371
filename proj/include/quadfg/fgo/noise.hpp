#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <stdexcept>

namespace quadfg::fgo {

/// Gaussian noise model stored as the upper-triangular square root of the
/// information matrix, so whiten(e) = sqrt_info * e and
/// |whiten(e)|^2 = e^T Sigma^-1 e.
class NoiseModel {
 public:
  NoiseModel() = default;

  static NoiseModel from_covariance(const Eigen::MatrixXd& cov) {
    if (cov.rows() != cov.cols()) {
      throw std::invalid_argument("NoiseModel: covariance must be square");
    }
    Eigen::LLT<Eigen::MatrixXd> cov_llt(cov);
    if (cov_llt.info() != Eigen::Success) {
      throw std::invalid_argument("NoiseModel: covariance is not positive definite");
    }
    const Eigen::MatrixXd info =
        cov_llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.rows()));
    Eigen::LLT<Eigen::MatrixXd> info_llt(0.5 * (info + info.transpose()));
    if (info_llt.info() != Eigen::Success) {
      throw std::invalid_argument("NoiseModel: information matrix is not positive definite");
    }
    NoiseModel m;
    m.sqrt_info_ = info_llt.matrixU();
    return m;
  }

  static NoiseModel from_sigmas(const Eigen::VectorXd& sigmas) {
    if ((sigmas.array() <= 0.0).any()) {
      throw std::invalid_argument("NoiseModel: sigmas must be positive");
    }
    NoiseModel m;
    m.sqrt_info_ = sigmas.cwiseInverse().asDiagonal();
    return m;
  }

  static NoiseModel isotropic(int dim, double sigma) {
    return from_sigmas(Eigen::VectorXd::Constant(dim, sigma));
  }

  int dim() const { return static_cast<int>(sqrt_info_.rows()); }

  Eigen::VectorXd whiten(const Eigen::VectorXd& e) const { return sqrt_info_ * e; }

  Eigen::MatrixXd whiten_jacobian(const Eigen::MatrixXd& J) const { return sqrt_info_ * J; }

  const Eigen::MatrixXd& sqrt_information() const { return sqrt_info_; }

 private:
  Eigen::MatrixXd sqrt_info_;
};

}  // namespace quadfg::fgo
