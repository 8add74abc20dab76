#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>

namespace matchwire {

enum class Side { User, Resource };

/// Index of an agent on the user side.
struct UserId {
  std::size_t index = 0;
  auto operator<=>(const UserId&) const = default;
};

/// Index of an agent on the resource side.
struct ResourceId {
  std::size_t index = 0;
  auto operator<=>(const ResourceId&) const = default;
};

struct AgentId {
  Side side = Side::User;
  std::size_t index = 0;
  auto operator<=>(const AgentId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, UserId u) { return os << 'u' << u.index; }
inline std::ostream& operator<<(std::ostream& os, ResourceId r) { return os << 'r' << r.index; }

}  // namespace matchwire

template <>
struct std::hash<matchwire::UserId> {
  std::size_t operator()(matchwire::UserId u) const noexcept { return std::hash<std::size_t>{}(u.index); }
};

template <>
struct std::hash<matchwire::ResourceId> {
  std::size_t operator()(matchwire::ResourceId r) const noexcept { return std::hash<std::size_t>{}(r.index); }
};
