// Factor-graph nonlinear least squares on a product manifold.
//
// The graph owns the variable set (with initial estimates) and the factor
// list. Solving minimizes the sum of squared whitened residuals with
// Levenberg-Marquardt on the dense normal equations; steps are applied
// through the manifold retraction (vector addition, right-multiplied
// exponential on rotation blocks).

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quadfg/fgo/factor.hpp"
#include "quadfg/fgo/values.hpp"

namespace quadfg::fgo {

struct LmConfig {
  int max_iterations = 50;
  double lambda_init = 1e-4;   // 0 gives plain Gauss-Newton steps
  double lambda_scale = 10.0;
  double abs_tol = 1e-8;       // on error decrease
  double rel_tol = 1e-6;       // on relative error decrease
  double lambda_max = 1e10;    // exceeding this counts as divergence
  double lambda_min = 1e-12;
};

struct SolveResult {
  bool converged = false;
  int iterations = 0;
  double initial_error = 0.0;
  double final_error = 0.0;
  Values values;
  std::string message;
};

/// Whitened linearization of the whole graph at one point: the sparse block
/// rows of J and the stacked residual, with min |J delta - b|^2, b = -r,
/// giving the Gauss-Newton step.
struct Linearization {
  struct Block {
    int col_offset = 0;
    Eigen::MatrixXd jac;  // whitened
  };
  struct Row {
    const Factor* factor = nullptr;
    int row_offset = 0;
    std::vector<Block> blocks;
    Eigen::VectorXd whitened_residual;
  };

  std::vector<Row> rows;
  int total_rows = 0;
  int total_cols = 0;

  Eigen::MatrixXd dense_jacobian() const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(total_rows, total_cols);
    for (const Row& row : rows) {
      for (const Block& b : row.blocks) {
        J.block(row.row_offset, b.col_offset, b.jac.rows(), b.jac.cols()) = b.jac;
      }
    }
    return J;
  }

  Eigen::VectorXd dense_rhs() const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(total_rows);
    for (const Row& row : rows) {
      b.segment(row.row_offset, row.whitened_residual.size()) = -row.whitened_residual;
    }
    return b;
  }
};

class FactorGraph {
 public:
  void add_variable(const Key& key, ManifoldValue initial) {
    if (initial_.contains(key)) {
      throw std::invalid_argument("FactorGraph: duplicate variable " + to_string(key));
    }
    offsets_[key] = tangent_dim_;
    tangent_dim_ += tangent_dim(initial);
    initial_.insert(key, std::move(initial));
  }

  void add_factor(std::shared_ptr<const Factor> factor) {
    for (const Key& k : factor->keys()) {
      if (!initial_.contains(k)) {
        throw std::invalid_argument("FactorGraph: factor " + factor->name() +
                                    " references unknown variable " + to_string(k));
      }
    }
    residual_dim_ += factor->dim();
    factors_.push_back(std::move(factor));
  }

  const Values& initial_values() const { return initial_; }
  const std::vector<std::shared_ptr<const Factor>>& factors() const { return factors_; }
  std::size_t num_variables() const { return initial_.size(); }
  std::size_t num_factors() const { return factors_.size(); }
  int total_tangent_dim() const { return tangent_dim_; }
  int total_residual_dim() const { return residual_dim_; }

  int offset_of(const Key& key) const { return offsets_.at(key); }

  /// Total squared whitened error at the given point.
  double error(const Values& values) const {
    double total = 0.0;
    for (const auto& f : factors_) {
      total += f->noise().whiten(f->residual(values)).squaredNorm();
    }
    return total;
  }

  Values retract_all(const Values& values, const Eigen::VectorXd& delta) const {
    Values out;
    for (const auto& [key, value] : values.items()) {
      const int off = offsets_.at(key);
      out.insert(key, retract(value, delta.segment(off, tangent_dim(value))));
    }
    return out;
  }

  Linearization linearize(const Values& values) const {
    Linearization lin;
    lin.total_cols = tangent_dim_;
    lin.total_rows = residual_dim_;
    lin.rows.reserve(factors_.size());
    int row_offset = 0;
    std::vector<Eigen::MatrixXd> jacs;
    for (std::size_t fi = 0; fi < factors_.size(); ++fi) {
      const Factor& f = *factors_[fi];
      const Eigen::VectorXd r = f.residual(values);
      if (!r.allFinite()) {
        throw std::runtime_error("FactorGraph: non-finite residual in factor #" +
                                 std::to_string(fi) + " (" + f.name() + ")");
      }
      f.jacobians(values, jacs);
      Linearization::Row row;
      row.factor = &f;
      row.row_offset = row_offset;
      row.whitened_residual = f.noise().whiten(r);
      row.blocks.reserve(f.keys().size());
      for (std::size_t ki = 0; ki < f.keys().size(); ++ki) {
        if (!jacs[ki].allFinite()) {
          throw std::runtime_error("FactorGraph: non-finite Jacobian in factor #" +
                                   std::to_string(fi) + " (" + f.name() + "), variable " +
                                   to_string(f.keys()[ki]));
        }
        row.blocks.push_back({offsets_.at(f.keys()[ki]), f.noise().whiten_jacobian(jacs[ki])});
      }
      row_offset += f.dim();
      lin.rows.push_back(std::move(row));
    }
    return lin;
  }

  SolveResult solve(const LmConfig& config = {}) const { return solve(initial_, config); }

  SolveResult solve(const Values& start, const LmConfig& config) const {
    if (initial_.size() == 0 || factors_.empty()) {
      throw std::invalid_argument("FactorGraph: solve requires at least one variable and factor");
    }
    SolveResult result;
    result.values = start;
    result.initial_error = error(start);
    result.final_error = result.initial_error;

    double lambda = config.lambda_init;
    double current_error = result.initial_error;

    Eigen::MatrixXd hessian(tangent_dim_, tangent_dim_);
    Eigen::VectorXd gradient(tangent_dim_);

    for (int iter = 0; iter < config.max_iterations; ++iter) {
      result.iterations = iter + 1;
      assemble_normal_equations(linearize(result.values), hessian, gradient);

      // Retry with increasing damping until a step reduces the error.
      bool accepted = false;
      while (!accepted) {
        Eigen::MatrixXd damped = hessian;
        damped.diagonal() += lambda * hessian.diagonal().cwiseMax(1e-10);
        Eigen::LLT<Eigen::MatrixXd> llt(damped);
        if (llt.info() == Eigen::Success) {
          const Eigen::VectorXd step = llt.solve(gradient);
          const Values candidate = retract_all(result.values, step);
          const double candidate_error = error(candidate);
          if (std::isfinite(candidate_error) && candidate_error <= current_error) {
            const double decrease = current_error - candidate_error;
            result.values = candidate;
            current_error = candidate_error;
            result.final_error = candidate_error;
            lambda = std::max(lambda / config.lambda_scale, config.lambda_min);
            accepted = true;
            if (decrease < config.abs_tol ||
                decrease < config.rel_tol * std::max(current_error, 1e-300)) {
              result.converged = true;
              result.message = "converged";
              return result;
            }
            break;
          }
        }
        lambda *= config.lambda_scale;
        if (lambda > config.lambda_max) {
          result.message = "diverged: damping exceeded " + std::to_string(config.lambda_max);
          return result;
        }
        if (lambda == 0.0) {  // lambda_init 0 and the pure GN step failed
          lambda = 1e-10;
        }
      }
    }
    result.converged = true;  // ran out of iterations while still improving
    result.message = "max iterations reached";
    return result;
  }

  /// Human-readable listing of factors, dimensions and whitened errors.
  void dump(std::ostream& os, const Values& values) const {
    os << "factor graph: " << num_variables() << " variables (tangent dim " << tangent_dim_
       << "), " << num_factors() << " factors (residual dim " << residual_dim_ << ")\n";
    for (std::size_t fi = 0; fi < factors_.size(); ++fi) {
      const Factor& f = *factors_[fi];
      std::ostringstream keys;
      for (const Key& k : f.keys()) keys << " " << to_string(k);
      os << "  #" << fi << " " << f.name() << " dim " << f.dim() << " keys" << keys.str()
         << " |whitened|^2 " << std::setprecision(6)
         << f.noise().whiten(f.residual(values)).squaredNorm() << "\n";
    }
    os << "total error " << std::setprecision(10) << error(values) << "\n";
  }

 private:
  void assemble_normal_equations(const Linearization& lin, Eigen::MatrixXd& hessian,
                                 Eigen::VectorXd& gradient) const {
    hessian.setZero();
    gradient.setZero();
    for (const Linearization::Row& row : lin.rows) {
      for (std::size_t i = 0; i < row.blocks.size(); ++i) {
        const auto& bi = row.blocks[i];
        gradient.segment(bi.col_offset, bi.jac.cols()).noalias() -=
            bi.jac.transpose() * row.whitened_residual;
        for (std::size_t j = 0; j < row.blocks.size(); ++j) {
          const auto& bj = row.blocks[j];
          hessian.block(bi.col_offset, bj.col_offset, bi.jac.cols(), bj.jac.cols()).noalias() +=
              bi.jac.transpose() * bj.jac;
        }
      }
    }
  }

  Values initial_;
  std::vector<std::shared_ptr<const Factor>> factors_;
  std::unordered_map<Key, int, KeyHash> offsets_;
  int tangent_dim_ = 0;
  int residual_dim_ = 0;
};

}  // namespace quadfg::fgo
