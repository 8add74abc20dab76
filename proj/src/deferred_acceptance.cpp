#include "matchwire/deferred_acceptance.hpp"

#include <algorithm>
#include <vector>

#include "matchwire/error.hpp"

namespace matchwire {

namespace {

// Side-agnostic view: proposers hold ordered lists over receivers, receivers
// rank proposers.
struct Market {
  std::vector<std::vector<std::size_t>> proposer_lists;
  std::vector<int> proposer_quota;
  std::vector<int> receiver_quota;
  // receiver_rank[receiver][proposer]
  std::vector<std::vector<std::size_t>> receiver_rank;
};

Market build_market(const ValidatedProfile& p, Proposer proposer) {
  Market m;
  const std::size_t nu = p.n_users();
  const std::size_t nr = p.n_resources();
  if (proposer == Proposer::Users) {
    m.proposer_lists.resize(nu);
    for (std::size_t u = 0; u < nu; ++u) {
      for (ResourceId r : p.user_prefs(UserId{u})) m.proposer_lists[u].push_back(r.index);
      m.proposer_quota.push_back(p.user_quota(UserId{u}));
    }
    m.receiver_rank.assign(nr, std::vector<std::size_t>(nu, kUnranked));
    for (std::size_t r = 0; r < nr; ++r) {
      m.receiver_quota.push_back(p.resource_quota(ResourceId{r}));
      for (std::size_t u = 0; u < nu; ++u) m.receiver_rank[r][u] = p.resource_rank(ResourceId{r}, UserId{u});
    }
  } else {
    m.proposer_lists.resize(nr);
    for (std::size_t r = 0; r < nr; ++r) {
      for (UserId u : p.resource_prefs(ResourceId{r})) m.proposer_lists[r].push_back(u.index);
      m.proposer_quota.push_back(p.resource_quota(ResourceId{r}));
    }
    m.receiver_rank.assign(nu, std::vector<std::size_t>(nr, kUnranked));
    for (std::size_t u = 0; u < nu; ++u) {
      m.receiver_quota.push_back(p.user_quota(UserId{u}));
      for (std::size_t r = 0; r < nr; ++r) m.receiver_rank[u][r] = p.user_rank(UserId{u}, ResourceId{r});
    }
  }
  return m;
}

}  // namespace

DaResult run_deferred_acceptance(const ValidatedProfile& profile, Proposer proposer) {
  if (profile.shape() == QuotaShape::ManyToMany) {
    throw MatchError(ErrorCode::QuotaShapeUnsupported, "deferred acceptance needs unit quotas on at least one side");
  }
  const Market market = build_market(profile, proposer);
  const std::size_t n_prop = market.proposer_lists.size();
  const std::size_t n_recv = market.receiver_quota.size();

  std::vector<std::size_t> next(n_prop, 0);   // next list position to try
  std::vector<int> held_count(n_prop, 0);     // tentative acceptances held
  std::vector<std::vector<std::size_t>> held(n_recv);  // proposers held by each receiver

  DaResult result;
  std::vector<std::vector<std::size_t>> incoming(n_recv);
  while (true) {
    bool any = false;
    for (std::size_t p = 0; p < n_prop; ++p) {
      const auto& list = market.proposer_lists[p];
      while (held_count[p] < market.proposer_quota[p] && next[p] < list.size()) {
        incoming[list[next[p]]].push_back(p);
        ++next[p];
        ++held_count[p];  // provisionally; undone on rejection
        ++result.proposals;
        any = true;
      }
    }
    if (!any) break;
    ++result.rounds;

    for (std::size_t r = 0; r < n_recv; ++r) {
      if (incoming[r].empty()) continue;
      auto& pool = held[r];
      pool.insert(pool.end(), incoming[r].begin(), incoming[r].end());
      incoming[r].clear();
      const auto& rank = market.receiver_rank[r];
      std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
      const auto keep = static_cast<std::size_t>(market.receiver_quota[r]);
      for (std::size_t i = std::min(keep, pool.size()); i < pool.size(); ++i) --held_count[pool[i]];
      if (pool.size() > keep) pool.resize(keep);
    }
  }

  result.matching = Matching(profile.n_users(), profile.n_resources());
  for (std::size_t r = 0; r < n_recv; ++r) {
    for (std::size_t p : held[r]) {
      if (proposer == Proposer::Users) {
        result.matching.add(UserId{p}, ResourceId{r});
      } else {
        result.matching.add(UserId{r}, ResourceId{p});
      }
    }
  }
  return result;
}

}  // namespace matchwire
