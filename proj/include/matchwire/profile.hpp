#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "matchwire/ids.hpp"

namespace matchwire {

/// Raw, unchecked preference data. Lists are ordered most-preferred first.
struct PreferenceProfile {
  std::vector<std::vector<ResourceId>> user_prefs;
  std::vector<std::vector<UserId>> resource_prefs;
  std::vector<int> user_quota;
  std::vector<int> resource_quota;

  /// Profile with `n_users` x `n_resources` agents, empty lists and unit quotas.
  static PreferenceProfile empty(std::size_t n_users, std::size_t n_resources);
};

enum class QuotaShape { OneToOne, ManyToOne, OneToMany, ManyToMany };

inline constexpr std::size_t kUnranked = std::numeric_limits<std::size_t>::max();

/// A profile that satisfies every structural invariant: strict lists,
/// mutual acceptability and positive quotas. Only `validate_profile`
/// constructs one, so holders can rely on the invariants without rechecking.
class ValidatedProfile {
 public:
  ValidatedProfile() = default;

  std::size_t n_users() const { return user_prefs_.size(); }
  std::size_t n_resources() const { return resource_prefs_.size(); }

  std::span<const ResourceId> user_prefs(UserId u) const { return user_prefs_.at(u.index); }
  std::span<const UserId> resource_prefs(ResourceId r) const { return resource_prefs_.at(r.index); }
  int user_quota(UserId u) const { return user_quota_.at(u.index); }
  int resource_quota(ResourceId r) const { return resource_quota_.at(r.index); }

  /// Position of `r` in `u`'s list, or kUnranked.
  std::size_t user_rank(UserId u, ResourceId r) const { return user_rank_[u.index * n_resources() + r.index]; }
  /// Position of `u` in `r`'s list, or kUnranked.
  std::size_t resource_rank(ResourceId r, UserId u) const { return resource_rank_[u.index * n_resources() + r.index]; }

  bool acceptable(UserId u, ResourceId r) const { return user_rank(u, r) != kUnranked; }

  /// Number of mutually acceptable pairs.
  std::size_t acceptable_pairs() const;

  QuotaShape shape() const;

  /// Copy of the underlying (already pruned) lists.
  PreferenceProfile to_profile() const;

  bool operator==(const ValidatedProfile&) const = default;

 private:
  friend ValidatedProfile validate_profile(PreferenceProfile profile);

  std::vector<std::vector<ResourceId>> user_prefs_;
  std::vector<std::vector<UserId>> resource_prefs_;
  std::vector<int> user_quota_;
  std::vector<int> resource_quota_;
  std::vector<std::size_t> user_rank_;      // row-major [user][resource]
  std::vector<std::size_t> resource_rank_;  // row-major [user][resource]
};

/// Checks strictness and quotas, then prunes one-sided entries so that
/// acceptability is mutual. Throws MatchError (DuplicateEntry, ZeroQuota,
/// UnknownAgent, InvalidArgument).
ValidatedProfile validate_profile(PreferenceProfile profile);

}  // namespace matchwire
