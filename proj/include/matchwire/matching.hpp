#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "matchwire/ids.hpp"

namespace matchwire {

/// A set of (user, resource) pairs with both adjacency views kept sorted.
/// Unmatched agents simply have empty views.
class Matching {
 public:
  Matching() = default;
  Matching(std::size_t n_users, std::size_t n_resources) : by_user_(n_users), by_resource_(n_resources) {}

  std::size_t n_users() const { return by_user_.size(); }
  std::size_t n_resources() const { return by_resource_.size(); }

  bool contains(UserId u, ResourceId r) const;
  /// Inserts the pair; returns false if it was already present.
  bool add(UserId u, ResourceId r);
  /// Removes the pair; returns false if it was absent.
  bool remove(UserId u, ResourceId r);
  void unmatch_user(UserId u);

  std::span<const ResourceId> resources_of(UserId u) const { return by_user_.at(u.index); }
  std::span<const UserId> users_of(ResourceId r) const { return by_resource_.at(r.index); }

  /// All pairs in (user, resource) lexicographic order.
  std::vector<std::pair<UserId, ResourceId>> pairs() const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  bool operator==(const Matching&) const = default;
  /// Lexicographic on the user view; gives matchings a canonical order.
  bool operator<(const Matching& other) const { return by_user_ < other.by_user_; }

 private:
  std::vector<std::vector<ResourceId>> by_user_;
  std::vector<std::vector<UserId>> by_resource_;
};

}  // namespace matchwire
