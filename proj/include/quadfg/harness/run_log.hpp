// Per-step records of a closed-loop run and the CSV emission/parsing used by
// the command-line tools. Values are written with enough digits to
// round-trip doubles exactly.

#pragma once

#include <Eigen/Core>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadfg/factors/control.hpp"
#include "quadfg/quad/state.hpp"
#include "quadfg/so3.hpp"

namespace quadfg::harness {

struct StepRecord {
  double t = 0.0;
  quad::QuadState truth;
  quad::QuadState measured;
  quad::QuadState estimate;
  factors::RefPoint reference;
  Eigen::Vector4d input = Eigen::Vector4d::Zero();
  int iterations = 0;
  double solve_seconds = 0.0;
  bool used_fallback = false;

  Eigen::Vector3d position_error() const { return truth.position - reference.position; }
  Eigen::Vector3d rotation_error() const {
    return so3::log(reference.rotation.transpose() * truth.rotation);
  }
};

struct RunLog {
  std::vector<StepRecord> steps;
  bool failed = false;
  std::string failure_message;
};

inline const char* csv_header() {
  return "t,p_true_x,p_true_y,p_true_z,p_ref_x,p_ref_y,p_ref_z,"
         "rotvec_x,rotvec_y,rotvec_z,u0,u1,u2,u3,"
         "err_p_x,err_p_y,err_p_z,err_R_x,err_R_y,err_R_z,iters,solve_ms";
}

inline void emit_csv(const RunLog& log, std::ostream& os) {
  os << csv_header() << "\n";
  char buf[32];
  const auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf << sep;
  };
  for (const StepRecord& s : log.steps) {
    const Eigen::Vector3d rotvec = so3::log(s.truth.rotation);
    const Eigen::Vector3d ep = s.position_error();
    const Eigen::Vector3d er = s.rotation_error();
    put(s.t, ',');
    for (int i = 0; i < 3; ++i) put(s.truth.position(i), ',');
    for (int i = 0; i < 3; ++i) put(s.reference.position(i), ',');
    for (int i = 0; i < 3; ++i) put(rotvec(i), ',');
    for (int i = 0; i < 4; ++i) put(s.input(i), ',');
    for (int i = 0; i < 3; ++i) put(ep(i), ',');
    for (int i = 0; i < 3; ++i) put(er(i), ',');
    os << s.iterations << ',';
    put(s.solve_seconds * 1e3, '\n');
  }
}

inline void emit_csv(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  emit_csv(log, out);
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing output file: " + path);
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw std::runtime_error("CSV column not found: " + name);
  }
};

inline CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty CSV input");
  }
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(table.header.size());
    std::stringstream rs(line);
    while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != table.header.size()) {
      throw std::runtime_error("CSV row has wrong number of columns");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline CsvTable parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open log file: " + path);
  }
  return parse_csv(in);
}

}  // namespace quadfg::harness
