// Flat key-value configuration files:
//
//   # comment
//   scenario.mode = jpcm-gi
//   traj.center = 0, 0, 1
//
// Keys are dotted strings, values are scalars, booleans, strings or
// comma-separated numeric vectors. Consumers mark keys as used; unknown keys
// left over after parsing a scenario are reported as errors to catch typos.

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace quadfg::harness {

class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::string& origin = "<stream>") {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                 ": expected 'key = value', got '" + trimmed + "'");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty key");
      }
      if (cfg.entries_.count(key) > 0) {
        throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                 ": duplicate key '" + key + "'");
      }
      cfg.entries_[key] = value;
    }
    return cfg;
  }

  static ConfigFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw std::runtime_error("cannot open config file: " + path);
    }
    return parse(in, path);
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& def) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    consumed_.insert(key);
    return it->second;
  }

  double get_double(const std::string& key, double def) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    consumed_.insert(key);
    return parse_double(key, it->second);
  }

  int get_int(const std::string& key, int def) const {
    const double v = get_double(key, static_cast<double>(def));
    const int i = static_cast<int>(std::lround(v));
    if (static_cast<double>(i) != v) {
      throw std::runtime_error(origin_ + ": key '" + key + "' must be an integer");
    }
    return i;
  }

  bool get_bool(const std::string& key, bool def) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    consumed_.insert(key);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::runtime_error(origin_ + ": key '" + key + "' must be true/false");
  }

  Eigen::VectorXd get_vector(const std::string& key, const Eigen::VectorXd& def) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return def;
    consumed_.insert(key);
    std::vector<double> parts;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      parts.push_back(parse_double(key, trim(item)));
    }
    if (static_cast<Eigen::Index>(parts.size()) != def.size()) {
      throw std::runtime_error(origin_ + ": key '" + key + "' expects " +
                               std::to_string(def.size()) + " comma-separated values");
    }
    return Eigen::Map<const Eigen::VectorXd>(parts.data(), parts.size());
  }

  Eigen::Vector3d get_vec3(const std::string& key, const Eigen::Vector3d& def) const {
    return get_vector(key, Eigen::VectorXd(def));
  }

  /// Keys present in the file that no getter ever touched.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : entries_) {
      if (consumed_.count(key) == 0) out.push_back(key);
    }
    return out;
  }

  void require_fully_consumed() const {
    const auto leftovers = unused_keys();
    if (!leftovers.empty()) {
      std::string msg = origin_ + ": unknown configuration keys:";
      for (const auto& k : leftovers) msg += " '" + k + "'";
      throw std::runtime_error(msg);
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
  }

  double parse_double(const std::string& key, const std::string& text) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw std::runtime_error(origin_ + ": key '" + key + "' has non-numeric value '" +
                               text + "'");
    }
    if (used != text.size()) {
      throw std::runtime_error(origin_ + ": key '" + key + "' has trailing characters in '" +
                               text + "'");
    }
    return v;
  }

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> consumed_;
  std::string origin_;
};

}  // namespace quadfg::harness
