#include <doctest.h>

#include <cmath>
#include <random>

#include "matchwire/deferred_acceptance.hpp"
#include "matchwire/dynamic.hpp"
#include "matchwire/error.hpp"
#include "matchwire/scenario_cr.hpp"
#include "oracles.hpp"

using namespace matchwire;
using namespace matchwire::testing;

namespace {

const std::vector<std::vector<double>> kIdentity2{{1.0, 0.0}, {0.0, 1.0}};

// Stationary law of a two-state chain: pi0 = p(1->0) / (p(0->1) + p(1->0)).
double stationary_first(double p01, double p10) { return p10 / (p01 + p10); }

double occupancy_of_zero(const std::vector<std::vector<double>>& matrix, std::size_t steps, std::uint64_t seed) {
  DynamicState s{0, {0}, {}};
  const auto model = TransitionModel::shared(1, matrix);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < steps; ++i) {
    s = advance(s, model, seed);
    zeros += s.discrete[0] == 0;
  }
  return static_cast<double>(zeros) / static_cast<double>(steps);
}

cr::CrInstance two_by_two() {
  // tx = noise = 1. SU0: PU0 rate 4, PU1 rate 2. SU1: rate 1 everywhere.
  cr::CrInstance in;
  in.n_su = 2;
  in.n_pu = 2;
  in.gain = {15.0, 3.0, 1.0, 1.0};
  in.noise_power = 1.0;
  in.tx_power = 1.0;
  in.pu_activity.assign(2, cr::PuActivity::Inactive);
  in.prior_active.assign(2, 0.0);  // sensing confidence is exactly 1
  in.sensing_snr.assign(4, 1.0);
  return in;
}

ContextFactory cr_factory(const cr::CrInstance& base, std::uint64_t seed) {
  return [base, seed](const DynamicState& state) {
    const auto in = cr::apply_state(base, state, 4.0);
    return cr::sensing_context(in, cr::sense(in, seed + state.epoch));
  };
}

}  // namespace

TEST_CASE("advance: identity transitions and rho = 1 leave the state alone") {
  DynamicState s{3, {0, 1, 1}, {0.2, -1.0}};
  const auto next = advance(s, TransitionModel::shared(3, kIdentity2, 1.0), 42);
  CHECK(next.epoch == 4);
  CHECK(next.discrete == s.discrete);
  CHECK(next.gains == s.gains);
}

TEST_CASE("advance: rho = 0 redraws gains, rho in between mixes") {
  DynamicState s{0, {}, std::vector<double>(4, 1.0)};
  TransitionModel m{{}, 0.0};
  CHECK(advance(s, m, 1).gains != s.gains);
  m.rho = 1.5;
  CHECK_THROWS_AS(advance(s, m, 1), MatchError);
}

TEST_CASE("advance: malformed rows are rejected") {
  DynamicState s{0, {0}, {}};
  try {
    advance(s, TransitionModel::shared(1, {{0.5, 0.4}, {0.0, 1.0}}), 1);
    FAIL("expected NonStochasticRow");
  } catch (const MatchError& e) {
    CHECK(e.code() == ErrorCode::NonStochasticRow);
  }
  CHECK_THROWS_AS(advance(DynamicState{0, {2}, {}}, TransitionModel::shared(1, kIdentity2), 1), MatchError);
  CHECK_THROWS_AS(advance(DynamicState{0, {0, 0}, {}}, TransitionModel::shared(1, kIdentity2), 1), MatchError);
}

TEST_CASE("advance: deterministic in seed and epoch") {
  const auto model = TransitionModel::shared(5, {{0.5, 0.5}, {0.5, 0.5}}, 0.3);
  DynamicState s{0, {0, 0, 1, 1, 0}, std::vector<double>(6, 0.0)};
  CHECK(advance(s, model, 9) == advance(s, model, 9));
  CHECK(advance(s, model, 9) != advance(s, model, 10));
}

TEST_CASE("symmetric two-state chain occupies each state half the time") {
  const double occ = occupancy_of_zero({{0.9, 0.1}, {0.1, 0.9}}, 100000, 2024);
  CHECK(stationary_first(0.1, 0.1) == 0.5);
  CHECK(std::abs(occ - 0.5) <= 0.01);
}

TEST_CASE("asymmetric two-state chain matches its stationary law") {
  const double occ = occupancy_of_zero({{0.8, 0.2}, {0.1, 0.9}}, 100000, 77);
  CHECK(std::abs(occ - stationary_first(0.2, 0.1)) <= 0.015);
}

TEST_CASE("Gauss-Markov gains keep unit variance and lag-one correlation rho") {
  const double rho = 0.8;
  DynamicState s{0, {}, {0.0}};
  TransitionModel m{{}, rho};
  std::vector<double> xs;
  for (int i = 0; i < 50000; ++i) {
    s = advance(s, m, 3);
    xs.push_back(s.gains[0]);
  }
  double mean = 0, var = 0, cov = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    var += (xs[i] - mean) * (xs[i] - mean);
    if (i) cov += (xs[i] - mean) * (xs[i - 1] - mean);
  }
  var /= xs.size();
  cov /= (xs.size() - 1);
  CHECK(std::abs(var - 1.0) < 0.05);
  CHECK(std::abs(cov / var - rho) < 0.02);
}

TEST_CASE("horizon: frozen dynamics never churn") {
  const auto base = two_by_two();
  const DynamicState init{0, {0, 1}, std::vector<double>(4, 0.3)};
  const auto reports = run_horizon(init, TransitionModel::shared(2, kIdentity2, 1.0), cr_factory(base, 1),
                                   MatcherConfig{MatcherKind::Canonical, Quotas::uniform(2, 2)}, 6, 5);
  REQUIRE(reports.size() == 6);
  for (const auto& r : reports) {
    CHECK(r.churn == 0.0);
    CHECK(r.matching == reports.front().matching);
    CHECK(r.carried_over_blocking_pairs == 0);
  }
}

TEST_CASE("horizon: one epoch is the static solve") {
  const auto base = two_by_two();
  const DynamicState init{0, {1, 0}, {}};
  const auto reports = run_horizon(init, TransitionModel::shared(2, {{0.5, 0.5}, {0.5, 0.5}}), cr_factory(base, 3),
                                   MatcherConfig{MatcherKind::Canonical, Quotas::uniform(2, 2)}, 1, 8);
  REQUIRE(reports.size() == 1);
  const auto in = cr::apply_state(base, init, 4.0);
  CHECK(reports[0].matching == cr::cr_allocate(in, cr::CrMethod::ModifiedDA, 3).matching);
  CHECK(reports[0].epoch == 0);
}

TEST_CASE("horizon: a PU waking up leaves carried-over blocking pairs") {
  // Epoch 0: PU0 busy, so SU0 takes PU1. The chain forces PU0 idle next.
  // Carried over, (SU0, PU0) and (SU1, PU0) both block: PU0 is vacant and
  // both SUs would take it (SU0: rate 4 > 2, SU1: unmatched).
  const auto base = two_by_two();
  const DynamicState init{0, {1, 0}, {}};
  TransitionModel model{{{{1.0, 0.0}, {1.0, 0.0}}, kIdentity2}, 1.0};
  const auto reports = run_horizon(init, model, cr_factory(base, 0),
                                   MatcherConfig{MatcherKind::Canonical, Quotas::uniform(2, 2)}, 2, 1);
  REQUIRE(reports.size() == 2);
  CHECK(to_pairs(reports[0].matching.pairs()) == PairSet{{0, 1}});
  CHECK(to_pairs(reports[1].matching.pairs()) == PairSet{{0, 0}, {1, 1}});
  CHECK(reports[1].carried_over_blocking_pairs == 2);
  CHECK(reports[1].churn == 1.0);
}

TEST_CASE("horizon: seeded runs repeat exactly; churn stays in [0, 1]") {
  cr::CrGeneratorConfig cfg;
  cfg.n_su = 5;
  cfg.n_pu = 4;
  const auto base = cr::generate_instance(cfg, 9);
  const DynamicState init{0, {0, 1, 0, 1}, std::vector<double>(20, 0.0)};
  const auto model = TransitionModel::shared(4, {{0.7, 0.3}, {0.4, 0.6}}, 0.9);
  for (auto kind : {MatcherKind::Canonical, MatcherKind::Iterative}) {
    const MatcherConfig mc{kind, Quotas::uniform(5, 4)};
    const auto a = run_horizon(init, model, cr_factory(base, 2), mc, 40, 123);
    const auto b = run_horizon(init, model, cr_factory(base, 2), mc, 40, 123);
    CHECK(epochs_to_csv(a) == epochs_to_csv(b));
    std::size_t carried = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].matching == b[i].matching);
      CHECK(a[i].churn >= 0.0);
      CHECK(a[i].churn <= 1.0);
      CHECK(a[i].epoch == i);
      carried += a[i].carried_over_blocking_pairs;
    }
    CHECK(carried > 0);
  }
}

TEST_CASE("churn helper") {
  Matching a(2, 2), b(2, 2);
  CHECK(churn(a, b) == 0.0);
  a.add(UserId{0}, ResourceId{0});
  b.add(UserId{0}, ResourceId{0});
  b.add(UserId{1}, ResourceId{1});
  CHECK(churn(a, b) == doctest::Approx(0.5));
}
