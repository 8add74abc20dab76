#pragma once

#include <cstddef>
#include <vector>

#include "matchwire/matching.hpp"
#include "matchwire/profile.hpp"

namespace matchwire {

/// A mutually acceptable, unmatched pair in which each side would rather
/// hold the other than (one of) its current partners, or has a free slot.
struct BlockingPair {
  UserId user;
  ResourceId resource;
  bool operator==(const BlockingPair&) const = default;
};

/// Throws MalformedMatching if the matching has the wrong dimensions,
/// exceeds a quota, or contains a pair that is not mutually acceptable.
void check_matching(const Matching& matching, const ValidatedProfile& profile);

/// Every blocking pair, in (user, resource) order. Empty iff stable.
std::vector<BlockingPair> find_blocking_pairs(const Matching& matching, const ValidatedProfile& profile);

inline bool is_stable(const Matching& matching, const ValidatedProfile& profile) {
  return find_blocking_pairs(matching, profile).empty();
}

/// True if `u` would accept `r` given what it currently holds in `matching`.
bool user_would_take(const Matching& matching, const ValidatedProfile& profile, UserId u, ResourceId r);
/// True if `r` would accept `u` given what it currently holds in `matching`.
bool resource_would_take(const Matching& matching, const ValidatedProfile& profile, ResourceId r, UserId u);

inline constexpr std::size_t kDefaultEnumerationCap = 10;

/// All stable matchings, found by exhaustive search over quota-feasible
/// assignments. Partial assignments are cut as soon as a blocking pair
/// against a saturated resource is certain, which never discards a stable
/// completion. Sorted in canonical order. Throws InstanceTooLarge when
/// either side has more than `max_per_side` agents.
std::vector<Matching> enumerate_stable_matchings(const ValidatedProfile& profile,
                                                 std::size_t max_per_side = kDefaultEnumerationCap);

}  // namespace matchwire
