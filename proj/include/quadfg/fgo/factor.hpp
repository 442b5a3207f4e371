#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>
#include <vector>

#include "quadfg/fgo/key.hpp"
#include "quadfg/fgo/noise.hpp"
#include "quadfg/fgo/values.hpp"

namespace quadfg::fgo {

/// A residual term over one or more variables. Jacobians are taken with
/// respect to right-perturbation tangent coordinates, in key order; the
/// default implementation falls back to central finite differences, so a
/// factor only has to provide its residual to be usable.
class Factor {
 public:
  Factor(std::vector<Key> keys, NoiseModel noise, std::string name)
      : keys_(std::move(keys)), noise_(std::move(noise)), name_(std::move(name)) {}
  virtual ~Factor() = default;

  const std::vector<Key>& keys() const { return keys_; }
  int dim() const { return noise_.dim(); }
  const NoiseModel& noise() const { return noise_; }
  const std::string& name() const { return name_; }

  /// Unwhitened residual.
  virtual Eigen::VectorXd residual(const Values& values) const = 0;

  /// Unwhitened Jacobian blocks, one per key. Default: central differences
  /// with step h on each tangent coordinate.
  virtual void jacobians(const Values& values, std::vector<Eigen::MatrixXd>& J) const {
    finite_difference_jacobians(values, J);
  }

  void finite_difference_jacobians(const Values& values, std::vector<Eigen::MatrixXd>& J,
                                   double h = 1e-6) const {
    J.resize(keys_.size());
    for (std::size_t ki = 0; ki < keys_.size(); ++ki) {
      const Key key = keys_[ki];
      const int vdim = tangent_dim(values.at(key));
      J[ki].resize(dim(), vdim);
      for (int c = 0; c < vdim; ++c) {
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(vdim);
        Values plus = values;
        Values minus = values;
        delta(c) = h;
        plus.at(key) = retract(values.at(key), delta);
        delta(c) = -h;
        minus.at(key) = retract(values.at(key), delta);
        J[ki].col(c) = (residual(plus) - residual(minus)) / (2.0 * h);
      }
    }
  }

 private:
  std::vector<Key> keys_;
  NoiseModel noise_;
  std::string name_;
};

}  // namespace quadfg::fgo
