#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "quadfg/fgo/key.hpp"
#include "quadfg/quad/state.hpp"

namespace quadfg::fgo {

/// One point on the product manifold: a vehicle state (tangent dim 12), a
/// wrench (4) or a rotor-speed vector (4).
using ManifoldValue = std::variant<quad::QuadState, quad::Wrench, quad::RotorSpeeds>;

inline int tangent_dim(const ManifoldValue& v) {
  return std::visit([](const auto& x) { return static_cast<int>(x.kTangentDim); }, v);
}

inline VarKind kind_of(const ManifoldValue& v) {
  if (std::holds_alternative<quad::QuadState>(v)) return VarKind::State;
  if (std::holds_alternative<quad::Wrench>(v)) return VarKind::Wrench;
  return VarKind::Rotor;
}

inline ManifoldValue retract(const ManifoldValue& v,
                             const Eigen::Ref<const Eigen::VectorXd>& delta) {
  return std::visit(
      [&](const auto& x) -> ManifoldValue {
        using T = std::decay_t<decltype(x)>;
        return x.retracted(Eigen::Matrix<double, T::kTangentDim, 1>(delta));
      },
      v);
}

/// Keyed container of manifold values with stable insertion order.
class Values {
 public:
  bool contains(const Key& k) const { return index_.count(k) > 0; }

  void insert(const Key& k, ManifoldValue v) {
    if (contains(k)) {
      throw std::invalid_argument("Values: duplicate key " + to_string(k));
    }
    index_.emplace(k, items_.size());
    items_.emplace_back(k, std::move(v));
  }

  const ManifoldValue& at(const Key& k) const {
    auto it = index_.find(k);
    if (it == index_.end()) {
      throw std::out_of_range("Values: unknown key " + to_string(k));
    }
    return items_[it->second].second;
  }

  ManifoldValue& at(const Key& k) {
    auto it = index_.find(k);
    if (it == index_.end()) {
      throw std::out_of_range("Values: unknown key " + to_string(k));
    }
    return items_[it->second].second;
  }

  template <typename T>
  const T& at(const Key& k) const {
    const ManifoldValue& v = at(k);
    const T* p = std::get_if<T>(&v);
    if (p == nullptr) {
      throw std::invalid_argument("Values: wrong value type for key " + to_string(k));
    }
    return *p;
  }

  std::size_t size() const { return items_.size(); }

  const std::vector<std::pair<Key, ManifoldValue>>& items() const { return items_; }

 private:
  std::vector<std::pair<Key, ManifoldValue>> items_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
};

}  // namespace quadfg::fgo
