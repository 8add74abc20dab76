#include <doctest.h>

#include <cmath>
#include <random>

#include "matchwire/deferred_acceptance.hpp"
#include "matchwire/error.hpp"
#include "matchwire/externality.hpp"
#include "matchwire/stability.hpp"
#include "oracles.hpp"

using namespace matchwire;
using namespace matchwire::testing;

namespace {

using Table = std::vector<std::vector<double>>;

std::size_t others_at(const Matching& m, ResourceId r, UserId self) {
  std::size_t n = 0;
  for (UserId t : m.users_of(r)) n += (t != self);
  return n;
}

/// Utility halves per co-tenant; resources are indifferent (ties by index).
FunctionContext halving_context(Table base) {
  const std::size_t nu = base.size();
  const std::size_t nr = base.front().size();
  return FunctionContext(
      nu, nr,
      [base](UserId u, ResourceId r, const Matching& m) {
        return base[u.index][r.index] / std::pow(2.0, static_cast<double>(others_at(m, r, u)));
      },
      [](ResourceId, UserId, const Matching&) { return 1.0; });
}

/// base / (1 + co-tenants); resources prefer lower user index.
FunctionContext sharing_context(Table base) {
  const std::size_t nu = base.size();
  const std::size_t nr = base.front().size();
  return FunctionContext(
      nu, nr,
      [base](UserId u, ResourceId r, const Matching& m) {
        return base[u.index][r.index] / (1.0 + static_cast<double>(others_at(m, r, u)));
      },
      [](ResourceId, UserId u, const Matching&) { return -static_cast<double>(u.index); });
}

FunctionContext static_context(Table user, Table resource) {
  const std::size_t nu = user.size();
  const std::size_t nr = resource.size();
  return FunctionContext(
      nu, nr, [user](UserId u, ResourceId r, const Matching&) { return user[u.index][r.index]; },
      [resource](ResourceId r, UserId u, const Matching&) { return resource[r.index][u.index]; });
}

Table random_table(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double unacceptable_prob) {
  std::uniform_real_distribution<double> val(0.1, 1.0);
  std::bernoulli_distribution drop(unacceptable_prob);
  Table t(rows, std::vector<double>(cols));
  for (auto& row : t)
    for (auto& x : row) x = drop(rng) ? kUnacceptable : val(rng);
  return t;
}

Matching pairs_to_matching(std::size_t nu, std::size_t nr, const PairSet& pairs) {
  Matching m(nu, nr);
  for (auto [u, r] : pairs) m.add(UserId{u}, ResourceId{r});
  return m;
}

}  // namespace

TEST_CASE("snapshot: matching-independent context yields the same profile everywhere") {
  std::mt19937_64 rng(3);
  const auto ctx = static_context(random_table(rng, 3, 4, 0.2), random_table(rng, 4, 3, 0.2));
  const auto q = Quotas::uniform(3, 4);
  const auto base = snapshot_preferences(ctx, Matching(3, 4), q);
  CHECK(snapshot_preferences(ctx, pairs_to_matching(3, 4, {{0, 1}, {2, 3}}), q) == base);
  CHECK(snapshot_preferences(ctx, pairs_to_matching(3, 4, {{1, 0}}), q) == base);
}

TEST_CASE("snapshot: a co-tenant pushes the shared resource down the list") {
  // u1 values r0 at 1.0 and r1 at 0.8. Once u0 sits on r0, r0 is worth 0.5.
  const auto ctx = halving_context({{1.0, 0.8}, {1.0, 0.8}});
  const auto q = Quotas{{1, 1}, {2, 2}};
  const auto alone = snapshot_preferences(ctx, Matching(2, 2), q);
  CHECK(alone.user_prefs(UserId{1})[0] == ResourceId{0});
  const auto shared = snapshot_preferences(ctx, pairs_to_matching(2, 2, {{0, 0}}), q);
  CHECK(shared.user_prefs(UserId{1})[0] == ResourceId{1});
  CHECK(shared.user_prefs(UserId{1})[1] == ResourceId{0});
}

TEST_CASE("snapshot: ties break by partner index; -inf drops; NaN throws") {
  const auto tie = static_context({{0.5, 0.5, 0.5}}, {{1.0}, {1.0}, {1.0}});
  const auto p = snapshot_preferences(tie, Matching(1, 3), Quotas::uniform(1, 3));
  REQUIRE(p.user_prefs(UserId{0}).size() == 3);
  CHECK(p.user_prefs(UserId{0})[0] == ResourceId{0});
  CHECK(p.user_prefs(UserId{0})[2] == ResourceId{2});

  const auto none = static_context({{kUnacceptable, kUnacceptable}}, {{kUnacceptable}, {kUnacceptable}});
  CHECK(snapshot_preferences(none, Matching(1, 2), Quotas::uniform(1, 2)).acceptable_pairs() == 0);

  const auto bad = static_context({{std::nan("")}}, {{1.0}});
  try {
    snapshot_preferences(bad, Matching(1, 1), Quotas::uniform(1, 1));
    FAIL("expected NonFiniteUtility");
  } catch (const MatchError& e) {
    CHECK(e.code() == ErrorCode::NonFiniteUtility);
  }
}

TEST_CASE("iterative DA: matching-independent context converges in two iterations") {
  std::mt19937_64 rng(11);
  const auto ctx = static_context(random_table(rng, 4, 3, 0.1), random_table(rng, 3, 4, 0.1));
  const auto q = Quotas::uniform(4, 3);
  const auto res = iterative_da(ctx, q, 10);
  CHECK(res.trace.termination == Termination::Fixpoint);
  CHECK(res.trace.iterations() == 2);
  CHECK(res.trace.records.size() == 3);
  CHECK(res.matching == deferred_acceptance(snapshot_preferences(ctx, Matching(4, 3), q), Proposer::Users));
  CHECK(res.trace.records.back().blocking_pairs == 0);
}

TEST_CASE("iterative DA: congestion spreads load") {
  // Solo utilities are the same for both users (r0: 1.0, r1: 0.8), halved per
  // co-tenant; r0 holds one user, r1 two. Iteration 1 (empty matching): both
  // rank r0 first, r0 keeps u0, u1 falls back to r1. Iteration 2: u0 sees
  // r0 = 1.0 > r1 = 0.4, u1 sees r1 = 0.8 > r0 = 0.5, so the matching repeats.
  const auto ctx = halving_context({{1.0, 0.8}, {1.0, 0.8}});
  const Quotas q{{1, 1}, {1, 2}};
  const auto res = iterative_da(ctx, q, 50);
  CHECK(res.trace.termination == Termination::Fixpoint);
  CHECK(res.trace.iterations() == 2);
  CHECK(to_pairs(res.matching.pairs()) == PairSet{{0, 0}, {1, 1}});

  // Hand-evaluated induced profile at the fixpoint:
  // u0: r0 (1.0) > r1 (0.4); u1: r1 (0.8) > r0 (0.5); resources tie -> index.
  RawProfile induced{{{0, 1}, {1, 0}}, {{0, 1}, {0, 1}}, {1, 1}, {1, 2}};
  CHECK(brute_blocking_pairs(induced, {{0, 0}, {1, 1}}).empty());
  // The stacked matching is not a fixpoint: u0 alone on r0 beats 0.4.
  RawProfile stacked{{{0, 1}, {0, 1}}, {{0, 1}, {0, 1}}, {1, 1}, {1, 2}};
  CHECK_FALSE(brute_blocking_pairs(stacked, {{0, 1}, {1, 1}}).empty());
}

TEST_CASE("iterative DA: a cycling context is detected at the first repeat") {
  // One user, two resources; whichever resource it holds looks worse.
  FunctionContext ctx(
      1, 2,
      [](UserId u, ResourceId r, const Matching& m) {
        if (m.empty()) return r.index == 0 ? 1.0 : 0.5;
        return m.contains(u, r) ? 0.5 : 1.0;
      },
      [](ResourceId, UserId, const Matching&) { return 1.0; });
  const auto res = iterative_da(ctx, Quotas::uniform(1, 2), 50);
  CHECK(res.trace.termination == Termination::Cycle);
  CHECK(res.trace.cycle_start == 1);
  CHECK(res.trace.iterations() == 2);
  CHECK(to_pairs(res.matching.pairs()) == PairSet{{0, 1}});

  const auto capped = iterative_da(ctx, Quotas::uniform(1, 2), 1);
  CHECK(capped.trace.termination == Termination::Cap);
  CHECK(capped.trace.records.size() == 2);
  CHECK_THROWS_AS(iterative_da(ctx, Quotas::uniform(1, 2), 0), MatchError);
}

TEST_CASE("trace csv has one row per record") {
  const auto ctx = halving_context({{1.0, 0.8}, {1.0, 0.8}});
  const auto res = iterative_da(ctx, Quotas{{1, 1}, {1, 2}}, 50);
  const auto csv = trace_to_csv(res.trace);
  CHECK(csv.rfind("iteration,blocking_pair_count,sum_utility,converged_flag\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(csv.substr(csv.size() - 2) == "1\n");
}

TEST_CASE("transfers: nothing to do on a stable matching-independent instance") {
  std::mt19937_64 rng(2);
  const auto ctx = static_context(random_table(rng, 3, 3, 0.0), random_table(rng, 3, 3, 0.0));
  const auto q = Quotas::uniform(3, 3);
  const auto m = deferred_acceptance(snapshot_preferences(ctx, Matching(3, 3), q), Proposer::Users);
  const auto res = transfer_phase(m, ctx, q, TransferPolicy::UserImproving);
  CHECK(res.matching == m);
  CHECK(res.swaps.empty());
  CHECK_FALSE(res.hit_cap);
}

TEST_CASE("transfers: the least happy tenant leaves the overloaded resource") {
  // Both users on r0 (quota 2), r1 empty. Utility = base / (1 + co-tenants).
  // u0: 0.8/2 = 0.4 now, 0.9 on r1 (gain 0.5). u1: 1.2/2 = 0.6 now, 0.6 on
  // r1 (no strict gain). After u0 moves: u1 has 1.2, u0 has 0.9; no moves.
  const auto ctx = sharing_context({{0.8, 0.9}, {1.2, 0.6}});
  const Quotas q{{1, 1}, {2, 2}};
  const auto start = pairs_to_matching(2, 2, {{0, 0}, {1, 0}});
  const auto res = transfer_phase(start, ctx, q, TransferPolicy::UserImproving);
  REQUIRE(res.swaps.size() == 1);
  CHECK(res.swaps[0].user == UserId{0});
  CHECK(res.swaps[0].from_resource == ResourceId{0});
  CHECK(res.swaps[0].to_resource == ResourceId{1});
  CHECK(res.swaps[0].gain == doctest::Approx(0.5));
  CHECK(to_pairs(res.matching.pairs()) == PairSet{{0, 1}, {1, 0}});
  CHECK(exchange_stability_check(res.matching, ctx, q));
}

TEST_CASE("transfers: user-improving output can keep a conventional blocking pair") {
  // u0 on r0, u1 on r1. u1 prefers r0 and r0 prefers u1, so u1 moves and
  // evicts u0. Now r1 is empty and u0 would take it, but unmatched users
  // cannot transfer: (u0, r1) blocks while no transfer is admissible.
  const auto ctx = static_context({{1.0, 0.5}, {1.0, 0.5}}, {{0.1, 0.9}, {0.5, 0.5}});
  const auto q = Quotas::uniform(2, 2);
  const auto res = transfer_phase(pairs_to_matching(2, 2, {{0, 0}, {1, 1}}), ctx, q, TransferPolicy::UserImproving);
  REQUIRE(res.swaps.size() == 1);
  REQUIRE(res.swaps[0].evicted.has_value());
  CHECK(*res.swaps[0].evicted == UserId{0});
  CHECK(exchange_stability_check(res.matching, ctx, q));
  const auto induced = snapshot_preferences(ctx, res.matching, q);
  const auto bps = find_blocking_pairs(res.matching, induced);
  REQUIRE(bps.size() == 1);
  CHECK(bps[0] == BlockingPair{UserId{0}, ResourceId{1}});
}

TEST_CASE("exchange stability: a vacant preferred resource is an improving transfer") {
  const auto ctx = static_context({{0.2, 0.9}}, {{1.0}, {1.0}});
  CHECK_FALSE(exchange_stability_check(pairs_to_matching(1, 2, {{0, 0}}), ctx, Quotas::uniform(1, 2)));
  CHECK(exchange_stability_check(pairs_to_matching(1, 2, {{0, 1}}), ctx, Quotas::uniform(1, 2)));
}

TEST_CASE("property: stable matchings of static contexts admit no transfers") {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<std::size_t> side(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nu = side(rng), nr = side(rng);
    const auto ctx = static_context(random_table(rng, nu, nr, 0.2), random_table(rng, nr, nu, 0.2));
    Quotas q = Quotas::uniform(nu, nr);
    if (trial % 2) q.resource.assign(nr, 2);
    const auto profile = snapshot_preferences(ctx, Matching(nu, nr), q);
    for (const auto& m : enumerate_stable_matchings(profile)) REQUIRE(exchange_stability_check(m, ctx, q));
  }
}

TEST_CASE("property: class I consistency") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto ctx = static_context(random_table(rng, 6, 5, 0.2), random_table(rng, 5, 6, 0.2));
    const Quotas q{std::vector<int>(6, 1), std::vector<int>(5, 2)};
    const auto res = iterative_da(ctx, q, 10);
    REQUIRE(res.trace.termination == Termination::Fixpoint);
    REQUIRE(res.matching == deferred_acceptance(snapshot_preferences(ctx, Matching(6, 5), q), Proposer::Users));
  }
}

TEST_CASE("property: transfers terminate and pair-improving welfare never drops") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> side(2, 8);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t nu = side(rng), nr = side(rng);
    const auto ctx = sharing_context(random_table(rng, nu, nr, 0.1));
    const Quotas q{std::vector<int>(nu, 1), std::vector<int>(nr, 3)};
    const auto start = deferred_acceptance(snapshot_preferences(ctx, Matching(nu, nr), q), Proposer::Users);
    for (auto policy : {TransferPolicy::UserImproving, TransferPolicy::PairImproving}) {
      const auto res = transfer_phase(start, ctx, q, policy);
      REQUIRE_FALSE(res.hit_cap);
      if (policy == TransferPolicy::UserImproving) REQUIRE(exchange_stability_check(res.matching, ctx, q));
      if (policy != TransferPolicy::PairImproving) continue;
      Matching replay = start;
      double welfare = social_welfare(ctx, replay);
      for (const auto& s : res.swaps) {
        REQUIRE(s.gain > 0.0);
        replay.remove(s.user, s.from_resource);
        if (s.evicted) replay.remove(*s.evicted, s.to_resource);
        replay.add(s.user, s.to_resource);
        const double next = social_welfare(ctx, replay);
        REQUIRE(next >= welfare - 1e-9);
        welfare = next;
      }
      REQUIRE(replay == res.matching);
    }
  }
}
