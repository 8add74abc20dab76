#pragma once

// Cognitive-radio channel allocation: secondary users (SUs, the user side)
// are matched one-to-one to primary-user channels (PUs, the resource side).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "matchwire/dynamic.hpp"
#include "matchwire/externality.hpp"
#include "matchwire/matching.hpp"
#include "matchwire/profile.hpp"

namespace matchwire::cr {

enum class PuActivity { Inactive = 0, Active = 1 };

struct CrInstance {
  std::size_t n_su = 0;
  std::size_t n_pu = 0;
  std::vector<double> gain;  // linear power gain, [su * n_pu + pu]
  double noise_power = 1e-13;
  double tx_power = 0.1;
  std::vector<PuActivity> pu_activity;
  std::vector<double> prior_active;
  std::vector<double> sensing_snr;  // linear, [su * n_pu + pu]
  int sensing_samples = 20;

  double gain_of(std::size_t su, std::size_t pu) const { return gain[su * n_pu + pu]; }
  double sensing_snr_of(std::size_t su, std::size_t pu) const { return sensing_snr[su * n_pu + pu]; }
};

/// Throws InvalidArgument on inconsistent sizes, non-positive gains or
/// probabilities outside [0, 1].
void validate(const CrInstance& instance);

/// Posterior probability that a PU channel is free ("confidence").
struct SensingReport {
  std::size_t n_su = 0;
  std::size_t n_pu = 0;
  std::vector<double> confidence;  // [su * n_pu + pu]

  double at(std::size_t su, std::size_t pu) const { return confidence[su * n_pu + pu]; }
};

/// P(inactive | y) for a normalized energy statistic y with the Gaussian
/// approximation y ~ N(1, 1/N) when idle and N(1 + snr, (1 + snr)^2 / N)
/// when busy.
double posterior_inactive(double y, double prior_active, double snr, int samples);

/// Draws one energy statistic per (SU, PU) under the PU's true activity and
/// converts it to a posterior.
SensingReport sense(const CrInstance& instance, std::uint64_t seed);

/// Shannon rate log2(1 + gain * tx_power / noise) in bit/s/Hz.
double rate(const CrInstance& instance, std::size_t su, std::size_t pu);

/// Sensing-aware utilities: SU values a channel at confidence * rate; an
/// idle PU ranks SUs by the same product, a busy PU accepts nobody.
std::unique_ptr<UtilityContext> sensing_context(const CrInstance& instance, const SensingReport& report);

/// Rate-only utilities, every pair acceptable.
std::unique_ptr<UtilityContext> rate_context(const CrInstance& instance);

ValidatedProfile cr_preferences(const CrInstance& instance, const SensingReport& report);

enum class CrMethod { ModifiedDA, ClassicalDA, Random };

struct CrResult {
  Matching matching;
  double sum_rate = 0.0;
  std::size_t proposals = 0;
  std::size_t rounds = 0;
  /// Against the method's own profile; Random is scored against the
  /// sensing-aware profile.
  std::size_t blocking_pairs = 0;
};

/// Rate summed over matched channels whose PU is idle; a collision with an
/// active PU earns nothing.
double realized_sum_rate(const CrInstance& instance, const Matching& matching);

CrResult cr_allocate(const CrInstance& instance, CrMethod method, std::uint64_t seed);

struct CrGeneratorConfig {
  std::size_t n_su = 4;
  std::size_t n_pu = 4;
  double prior_active = 0.5;
  double sensing_snr_db = 0.0;
  double sensing_snr_sigma_db = 3.0;
  int sensing_samples = 50;
  double gain_mean_db = -100.0;
  double gain_sigma_db = 8.0;
  double tx_power_dbm = 20.0;
  double noise_dbm = -100.0;
};

/// PU activity is drawn from the prior; gains and sensing SNRs are log-normal.
CrInstance generate_instance(const CrGeneratorConfig& config, std::uint64_t seed);

/// Copy of `base` with PU activity taken from `state.discrete` and, when
/// `state.gains` is non-empty, gains scaled by 10^(shadow_sigma_db * g / 10).
CrInstance apply_state(const CrInstance& base, const DynamicState& state, double shadow_sigma_db);

}  // namespace matchwire::cr
