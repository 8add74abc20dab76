#include "matchwire/stability.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "matchwire/error.hpp"

namespace matchwire {

void check_matching(const Matching& matching, const ValidatedProfile& profile) {
  if (matching.n_users() != profile.n_users() || matching.n_resources() != profile.n_resources()) {
    throw MatchError(ErrorCode::MalformedMatching, "matching dimensions differ from the profile");
  }
  for (std::size_t u = 0; u < profile.n_users(); ++u) {
    const auto held = matching.resources_of(UserId{u});
    if (held.size() > static_cast<std::size_t>(profile.user_quota(UserId{u}))) {
      throw MatchError(ErrorCode::MalformedMatching, "user " + std::to_string(u) + " exceeds its quota");
    }
    for (ResourceId r : held) {
      if (!profile.acceptable(UserId{u}, r)) {
        throw MatchError(ErrorCode::MalformedMatching, "pair (" + std::to_string(u) + ", " +
                                                           std::to_string(r.index) + ") is not acceptable");
      }
    }
  }
  for (std::size_t r = 0; r < profile.n_resources(); ++r) {
    if (matching.users_of(ResourceId{r}).size() > static_cast<std::size_t>(profile.resource_quota(ResourceId{r}))) {
      throw MatchError(ErrorCode::MalformedMatching, "resource " + std::to_string(r) + " exceeds its quota");
    }
  }
}

bool user_would_take(const Matching& matching, const ValidatedProfile& profile, UserId u, ResourceId r) {
  const auto held = matching.resources_of(u);
  if (held.size() < static_cast<std::size_t>(profile.user_quota(u))) return true;
  const std::size_t rank = profile.user_rank(u, r);
  return std::any_of(held.begin(), held.end(), [&](ResourceId h) { return rank < profile.user_rank(u, h); });
}

bool resource_would_take(const Matching& matching, const ValidatedProfile& profile, ResourceId r, UserId u) {
  const auto held = matching.users_of(r);
  if (held.size() < static_cast<std::size_t>(profile.resource_quota(r))) return true;
  const std::size_t rank = profile.resource_rank(r, u);
  return std::any_of(held.begin(), held.end(), [&](UserId h) { return rank < profile.resource_rank(r, h); });
}

std::vector<BlockingPair> find_blocking_pairs(const Matching& matching, const ValidatedProfile& profile) {
  check_matching(matching, profile);
  std::vector<BlockingPair> out;
  for (std::size_t ui = 0; ui < profile.n_users(); ++ui) {
    const UserId u{ui};
    std::vector<ResourceId> candidates(profile.user_prefs(u).begin(), profile.user_prefs(u).end());
    std::sort(candidates.begin(), candidates.end());
    for (ResourceId r : candidates) {
      if (matching.contains(u, r)) continue;
      if (user_would_take(matching, profile, u, r) && resource_would_take(matching, profile, r, u)) {
        out.push_back({u, r});
      }
    }
  }
  return out;
}

namespace {

class StableEnumerator {
 public:
  explicit StableEnumerator(const ValidatedProfile& profile)
      : profile_(profile), current_(profile.n_users(), profile.n_resources()) {}

  std::vector<Matching> run() {
    descend(0);
    std::sort(found_.begin(), found_.end());
    return std::move(found_);
  }

 private:
  bool full(ResourceId r) const {
    return current_.users_of(r).size() >= static_cast<std::size_t>(profile_.resource_quota(r));
  }

  // With users 0..decided_upto fixed, (u, r) blocks in every completion when
  // r already holds someone it ranks below u, or when r can no longer fill
  // its quota with users it ranks above u.
  bool certain_block(UserId u, ResourceId r, std::size_t decided_upto) const {
    if (current_.contains(u, r) || !user_would_take(current_, profile_, u, r)) return false;
    const std::size_t rank = profile_.resource_rank(r, u);
    if (rank == kUnranked) return false;
    std::size_t better = 0;
    for (UserId h : current_.users_of(r)) {
      if (profile_.resource_rank(r, h) > rank) return true;
      ++better;
    }
    for (UserId v : profile_.resource_prefs(r)) {
      if (profile_.resource_rank(r, v) >= rank) break;
      better += v.index > decided_upto;
    }
    return better < static_cast<std::size_t>(profile_.resource_quota(r));
  }

  bool prunable(std::size_t decided_upto) const {
    for (std::size_t ui = 0; ui <= decided_upto; ++ui) {
      for (ResourceId r : profile_.user_prefs(UserId{ui})) {
        if (certain_block(UserId{ui}, r, decided_upto)) return true;
      }
    }
    return false;
  }

  void descend(std::size_t ui) {
    if (ui == profile_.n_users()) {
      if (is_stable(current_, profile_)) found_.push_back(current_);
      return;
    }
    const UserId u{ui};
    const auto list = profile_.user_prefs(u);
    const auto quota = static_cast<std::size_t>(profile_.user_quota(u));
    std::vector<ResourceId> chosen;
    choose(u, list, 0, quota, chosen);
  }

  // Enumerates subsets of u's list of size <= quota among resources with room.
  void choose(UserId u, std::span<const ResourceId> list, std::size_t from, std::size_t quota,
              std::vector<ResourceId>& chosen) {
    if (!prunable(u.index)) descend(u.index + 1);
    if (chosen.size() == quota) return;
    for (std::size_t i = from; i < list.size(); ++i) {
      const ResourceId r = list[i];
      if (full(r)) continue;
      current_.add(u, r);
      chosen.push_back(r);
      choose(u, list, i + 1, quota, chosen);
      chosen.pop_back();
      current_.remove(u, r);
    }
  }

  const ValidatedProfile& profile_;
  Matching current_;
  std::vector<Matching> found_;
};

}  // namespace

std::vector<Matching> enumerate_stable_matchings(const ValidatedProfile& profile, std::size_t max_per_side) {
  if (profile.n_users() > max_per_side || profile.n_resources() > max_per_side) {
    throw MatchError(ErrorCode::InstanceTooLarge, "enumeration is capped at " + std::to_string(max_per_side) +
                                                      " agents per side");
  }
  return StableEnumerator(profile).run();
}

}  // namespace matchwire
