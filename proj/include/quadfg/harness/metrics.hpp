#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

#include "quadfg/harness/run_log.hpp"

namespace quadfg::harness {

struct RmseReport {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // m, per axis
  Eigen::Vector3d rotation = Eigen::Vector3d::Zero();  // rad, per axis
  int samples = 0;
};

/// Per-axis RMSE of the tracking error (truth vs reference); records with
/// t < exclude_seconds are dropped to skip the initial transient.
inline RmseReport compute_rmse(const RunLog& log, double exclude_seconds = 1.0) {
  if (log.steps.empty()) {
    throw std::invalid_argument("compute_rmse: empty run log");
  }
  Eigen::Vector3d pos_sq = Eigen::Vector3d::Zero();
  Eigen::Vector3d rot_sq = Eigen::Vector3d::Zero();
  int n = 0;
  for (const StepRecord& s : log.steps) {
    if (s.t < exclude_seconds) continue;
    pos_sq += s.position_error().cwiseAbs2();
    rot_sq += s.rotation_error().cwiseAbs2();
    ++n;
  }
  if (n == 0) {
    throw std::invalid_argument("compute_rmse: no samples after transient exclusion");
  }
  RmseReport r;
  r.position = (pos_sq / n).cwiseSqrt();
  r.rotation = (rot_sq / n).cwiseSqrt();
  r.samples = n;
  return r;
}

/// Same metric recomputed from an emitted CSV log.
inline RmseReport rmse_from_table(const CsvTable& table, double exclude_seconds = 1.0) {
  const int ct = table.column("t");
  const int cp = table.column("err_p_x");
  const int cr = table.column("err_R_x");
  Eigen::Vector3d pos_sq = Eigen::Vector3d::Zero();
  Eigen::Vector3d rot_sq = Eigen::Vector3d::Zero();
  int n = 0;
  for (const auto& row : table.rows) {
    if (row[ct] < exclude_seconds) continue;
    for (int a = 0; a < 3; ++a) {
      pos_sq(a) += row[cp + a] * row[cp + a];
      rot_sq(a) += row[cr + a] * row[cr + a];
    }
    ++n;
  }
  if (n == 0) {
    throw std::invalid_argument("rmse_from_table: no samples after transient exclusion");
  }
  RmseReport r;
  r.position = (pos_sq / n).cwiseSqrt();
  r.rotation = (rot_sq / n).cwiseSqrt();
  r.samples = n;
  return r;
}

}  // namespace quadfg::harness
