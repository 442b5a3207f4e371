#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace quadfg::fgo {

enum class VarKind : std::uint8_t { State, Wrench, Rotor };

/// Identifies one optimization variable by kind and time index.
struct Key {
  VarKind kind = VarKind::State;
  std::int32_t index = 0;

  friend auto operator<=>(const Key&, const Key&) = default;
};

inline Key state_key(std::int32_t t) { return {VarKind::State, t}; }
inline Key wrench_key(std::int32_t t) { return {VarKind::Wrench, t}; }
inline Key rotor_key(std::int32_t t) { return {VarKind::Rotor, t}; }

inline std::string to_string(const Key& k) {
  switch (k.kind) {
    case VarKind::State:  return "x" + std::to_string(k.index);
    case VarKind::Wrench: return "w" + std::to_string(k.index);
    case VarKind::Rotor:  return "u" + std::to_string(k.index);
  }
  return "?" + std::to_string(k.index);
}

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    return std::hash<std::uint64_t>{}(
        (static_cast<std::uint64_t>(k.kind) << 32) ^
        static_cast<std::uint32_t>(k.index));
  }
};

}  // namespace quadfg::fgo
