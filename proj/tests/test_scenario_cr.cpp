#include <doctest.h>

#include <cmath>

#include "matchwire/error.hpp"
#include "matchwire/scenario_cr.hpp"
#include "matchwire/stability.hpp"

using namespace matchwire;
using namespace matchwire::cr;

namespace {

CrInstance flat_instance(std::size_t n_su, std::size_t n_pu, double prior, double snr) {
  CrInstance in;
  in.n_su = n_su;
  in.n_pu = n_pu;
  in.gain.assign(n_su * n_pu, 1.0);
  in.noise_power = 1.0;
  in.tx_power = 1.0;
  in.pu_activity.assign(n_pu, PuActivity::Inactive);
  in.prior_active.assign(n_pu, prior);
  in.sensing_snr.assign(n_su * n_pu, snr);
  in.sensing_samples = 20;
  return in;
}

// Bayes rule written out with plain densities, independent of the library.
double oracle_posterior(double y, double p1, double snr, double n) {
  auto pdf = [](double x, double mu, double var) {
    return std::exp(-(x - mu) * (x - mu) / (2 * var)) / std::sqrt(2 * M_PI * var);
  };
  const double f0 = pdf(y, 1.0, 1.0 / n);
  const double f1 = pdf(y, 1.0 + snr, (1 + snr) * (1 + snr) / n);
  return (1 - p1) * f0 / ((1 - p1) * f0 + p1 * f1);
}

// E[posterior | idle] by midpoint quadrature over y ~ N(1, 1/n).
double oracle_mean_confidence_idle(double p1, double snr, double n) {
  const double sd = 1.0 / std::sqrt(n);
  const int steps = 20000;
  const double lo = 1.0 - 10 * sd, hi = 1.0 + 10 * sd, h = (hi - lo) / steps;
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double y = lo + (i + 0.5) * h;
    const double w = std::exp(-(y - 1.0) * (y - 1.0) / (2 * sd * sd)) / (std::sqrt(2 * M_PI) * sd);
    acc += w * oracle_posterior(y, p1, snr, n) * h;
  }
  return acc;
}

}  // namespace

TEST_CASE("posterior matches Bayes rule") {
  for (double y : {0.5, 0.9, 1.0, 1.3, 2.0}) {
    CHECK(posterior_inactive(y, 0.3, 0.5, 20) == doctest::Approx(oracle_posterior(y, 0.3, 0.5, 20)).epsilon(1e-12));
  }
}

TEST_CASE("sensing: degenerate prior gives full confidence") {
  auto in = flat_instance(3, 3, 0.0, 1.0);
  in.pu_activity[1] = PuActivity::Active;
  const auto rep = sense(in, 1);
  for (double c : rep.confidence) CHECK(c == 1.0);
}

TEST_CASE("sensing: an uninformative detector returns the prior") {
  const auto in = flat_instance(2, 3, 0.3, 0.0);
  const auto rep = sense(in, 4);
  for (double c : rep.confidence) CHECK(c == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("sensing: high SNR on an idle channel is almost certain") {
  // 100 x 100 idle channels = 10^4 independent draws at 20 dB.
  const double snr = 100.0;
  const auto in = flat_instance(100, 100, 0.5, snr);
  const auto rep = sense(in, 12);
  double mean = 0.0;
  for (double c : rep.confidence) {
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    mean += c;
  }
  mean /= static_cast<double>(rep.confidence.size());
  const double expected = oracle_mean_confidence_idle(0.5, snr, 20);
  CHECK(expected >= 0.99);
  CHECK(mean >= 0.99);
  CHECK(mean == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("sensing: moderate SNR agrees with quadrature") {
  const auto in = flat_instance(100, 100, 0.4, 0.5);
  const auto rep = sense(in, 77);
  double mean = 0.0;
  for (double c : rep.confidence) mean += c;
  mean /= 1e4;
  // Standard error of the mean is below 0.003 here.
  CHECK(std::abs(mean - oracle_mean_confidence_idle(0.4, 0.5, 20)) < 0.01);
}

TEST_CASE("preferences: all PUs active gives an empty profile") {
  auto in = flat_instance(3, 2, 0.5, 1.0);
  in.pu_activity.assign(2, PuActivity::Active);
  const auto p = cr_preferences(in, sense(in, 0));
  CHECK(p.acceptable_pairs() == 0);
  CHECK(cr_allocate(in, CrMethod::ModifiedDA, 0).matching.empty());
}

TEST_CASE("preferences: 2x2 hand instance") {
  // tx = noise = 1 so rate = log2(1 + g). Rates: su0 -> (2, 1), su1 -> (3, 4).
  CrInstance in = flat_instance(2, 2, 0.5, 1.0);
  in.gain = {3.0, 1.0, 7.0, 15.0};
  SensingReport rep{2, 2, {0.5, 0.9, 0.8, 0.25}};
  // Utilities: su0: pu0 1.0, pu1 0.9; su1: pu0 2.4, pu1 1.0.
  auto p = cr_preferences(in, rep);
  CHECK(p.user_prefs(UserId{0})[0] == ResourceId{0});
  CHECK(p.user_prefs(UserId{0})[1] == ResourceId{1});
  CHECK(p.user_prefs(UserId{1})[0] == ResourceId{0});
  CHECK(p.resource_prefs(ResourceId{0})[0] == UserId{1});
  CHECK(p.resource_prefs(ResourceId{1})[0] == UserId{1});  // 1.0 > 0.9

  in.pu_activity[1] = PuActivity::Active;
  p = cr_preferences(in, rep);
  CHECK(p.resource_prefs(ResourceId{1}).empty());
  CHECK(p.user_prefs(UserId{0}).size() == 1);
}

TEST_CASE("allocation: single pair is found by every method") {
  auto in = flat_instance(1, 1, 0.5, 1.0);
  in.gain = {3.0};
  for (auto m : {CrMethod::ModifiedDA, CrMethod::ClassicalDA, CrMethod::Random}) {
    const auto res = cr_allocate(in, m, 5);
    CHECK(res.matching.size() == 1);
    CHECK(res.sum_rate == doctest::Approx(2.0));
  }
}

TEST_CASE("allocation: with certain sensing and idle PUs modified equals classical") {
  CrGeneratorConfig cfg;
  cfg.prior_active = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto in = generate_instance(cfg, seed);
    const auto a = cr_allocate(in, CrMethod::ModifiedDA, seed);
    const auto b = cr_allocate(in, CrMethod::ClassicalDA, seed);
    REQUIRE(a.matching == b.matching);
    REQUIRE(a.sum_rate == b.sum_rate);
  }
}

TEST_CASE("allocation: collisions with active PUs earn nothing") {
  auto in = flat_instance(2, 2, 0.5, 1.0);
  in.gain = {3.0, 1.0, 7.0, 15.0};
  in.pu_activity[0] = PuActivity::Active;
  Matching m(2, 2);
  m.add(UserId{0}, ResourceId{0});
  m.add(UserId{1}, ResourceId{1});
  CHECK(realized_sum_rate(in, m) == doctest::Approx(4.0));
}

TEST_CASE("property: modified DA is stable, never uses an active PU, and is reproducible") {
  CrGeneratorConfig cfg;
  int beats_random = 0, total = 0;
  for (std::size_t n = 4; n <= 8; ++n) {
    cfg.n_su = cfg.n_pu = n;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto in = generate_instance(cfg, seed);
      const auto res = cr_allocate(in, CrMethod::ModifiedDA, seed);
      REQUIRE(res.blocking_pairs == 0);
      REQUIRE(is_stable(res.matching, cr_preferences(in, sense(in, seed))));
      for (const auto& [su, pu] : res.matching.pairs()) REQUIRE(in.pu_activity[pu.index] == PuActivity::Inactive);
      REQUIRE(cr_allocate(in, CrMethod::ModifiedDA, seed).matching == res.matching);
      beats_random += res.sum_rate >= cr_allocate(in, CrMethod::Random, seed).sum_rate;
      ++total;
    }
  }
  CHECK(beats_random >= 0.95 * total);
}

TEST_CASE("invalid instances are rejected") {
  auto in = flat_instance(1, 1, 0.5, 1.0);
  in.gain = {0.0};
  CHECK_THROWS_AS(validate(in), MatchError);
  in = flat_instance(1, 1, 1.5, 1.0);
  CHECK_THROWS_AS(validate(in), MatchError);
}
