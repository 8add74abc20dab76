#include "matchwire/profile.hpp"

#include <algorithm>
#include <string>

#include "matchwire/error.hpp"

namespace matchwire {

PreferenceProfile PreferenceProfile::empty(std::size_t n_users, std::size_t n_resources) {
  PreferenceProfile p;
  p.user_prefs.resize(n_users);
  p.resource_prefs.resize(n_resources);
  p.user_quota.assign(n_users, 1);
  p.resource_quota.assign(n_resources, 1);
  return p;
}

std::size_t ValidatedProfile::acceptable_pairs() const {
  std::size_t m = 0;
  for (const auto& list : user_prefs_) m += list.size();
  return m;
}

QuotaShape ValidatedProfile::shape() const {
  const bool users_unit = std::all_of(user_quota_.begin(), user_quota_.end(), [](int q) { return q == 1; });
  const bool resources_unit =
      std::all_of(resource_quota_.begin(), resource_quota_.end(), [](int q) { return q == 1; });
  if (users_unit && resources_unit) return QuotaShape::OneToOne;
  if (users_unit) return QuotaShape::ManyToOne;
  if (resources_unit) return QuotaShape::OneToMany;
  return QuotaShape::ManyToMany;
}

PreferenceProfile ValidatedProfile::to_profile() const {
  return PreferenceProfile{user_prefs_, resource_prefs_, user_quota_, resource_quota_};
}

namespace {

template <typename Id>
std::vector<std::size_t> ranks_of(const std::vector<Id>& list, std::size_t bound, const char* owner,
                                  std::size_t owner_index) {
  std::vector<std::size_t> rank(bound, kUnranked);
  for (std::size_t pos = 0; pos < list.size(); ++pos) {
    const std::size_t idx = list[pos].index;
    if (idx >= bound) {
      throw MatchError(ErrorCode::UnknownAgent, std::string(owner) + " " + std::to_string(owner_index) +
                                                    " lists unknown partner " + std::to_string(idx));
    }
    if (rank[idx] != kUnranked) {
      throw MatchError(ErrorCode::DuplicateEntry, std::string(owner) + " " + std::to_string(owner_index) +
                                                      " lists partner " + std::to_string(idx) + " twice");
    }
    rank[idx] = pos;
  }
  return rank;
}

}  // namespace

ValidatedProfile validate_profile(PreferenceProfile profile) {
  const std::size_t nu = profile.user_prefs.size();
  const std::size_t nr = profile.resource_prefs.size();
  if (profile.user_quota.size() != nu || profile.resource_quota.size() != nr) {
    throw MatchError(ErrorCode::InvalidArgument, "quota vector length does not match agent count");
  }
  for (std::size_t u = 0; u < nu; ++u) {
    if (profile.user_quota[u] < 1) {
      throw MatchError(ErrorCode::ZeroQuota, "user " + std::to_string(u) + " has quota < 1");
    }
  }
  for (std::size_t r = 0; r < nr; ++r) {
    if (profile.resource_quota[r] < 1) {
      throw MatchError(ErrorCode::ZeroQuota, "resource " + std::to_string(r) + " has quota < 1");
    }
  }

  std::vector<std::size_t> user_rank(nu * nr, kUnranked);
  std::vector<std::size_t> resource_rank(nu * nr, kUnranked);
  for (std::size_t u = 0; u < nu; ++u) {
    const auto rank = ranks_of(profile.user_prefs[u], nr, "user", u);
    for (std::size_t r = 0; r < nr; ++r) user_rank[u * nr + r] = rank[r];
  }
  for (std::size_t r = 0; r < nr; ++r) {
    const auto rank = ranks_of(profile.resource_prefs[r], nu, "resource", r);
    for (std::size_t u = 0; u < nu; ++u) resource_rank[u * nr + r] = rank[u];
  }

  ValidatedProfile v;
  v.user_prefs_.resize(nu);
  v.resource_prefs_.resize(nr);
  v.user_rank_.assign(nu * nr, kUnranked);
  v.resource_rank_.assign(nu * nr, kUnranked);

  // Prune one-sided entries, keeping the relative order of the survivors.
  for (std::size_t u = 0; u < nu; ++u) {
    for (ResourceId r : profile.user_prefs[u]) {
      if (resource_rank[u * nr + r.index] == kUnranked) continue;
      v.user_rank_[u * nr + r.index] = v.user_prefs_[u].size();
      v.user_prefs_[u].push_back(r);
    }
  }
  for (std::size_t r = 0; r < nr; ++r) {
    for (UserId u : profile.resource_prefs[r]) {
      if (user_rank[u.index * nr + r] == kUnranked) continue;
      v.resource_rank_[u.index * nr + r] = v.resource_prefs_[r].size();
      v.resource_prefs_[r].push_back(u);
    }
  }
  v.user_quota_ = std::move(profile.user_quota);
  v.resource_quota_ = std::move(profile.resource_quota);
  return v;
}

}  // namespace matchwire
