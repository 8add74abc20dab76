#pragma once

// D2D underlay spectrum sharing: device-to-device pairs (DUs, the user side)
// are matched one-to-one to cellular users (CUs, the resource side) whose
// uplink band they reuse.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "matchwire/matching.hpp"
#include "matchwire/profile.hpp"
#include "matchwire/stability.hpp"

namespace matchwire::d2d {

struct D2dInstance {
  std::size_t n_cu = 0;
  std::size_t n_du = 0;
  std::vector<double> du_rate;          // [du * n_cu + cu], bit/s/Hz on that band
  std::vector<double> cu_interference;  // [cu * n_du + du], power at the CU's receiver
  std::vector<double> du_payment;       // [du * n_cu + cu], offered for that band
  std::vector<double> cu_signal;        // per CU, received signal power
  double noise_power = 1.0;
  double sinr_floor_cu = 0.0;  // linear
  double rate_floor_du = 0.0;

  double rate_of(std::size_t du, std::size_t cu) const { return du_rate[du * n_cu + cu]; }
  double interference_of(std::size_t cu, std::size_t du) const { return cu_interference[cu * n_du + du]; }
  double payment_of(std::size_t du, std::size_t cu) const { return du_payment[du * n_cu + cu]; }
};

/// Throws InvalidArgument on inconsistent sizes or negative / non-finite
/// values.
void validate(const D2dInstance& instance);

/// SINR of CU `cu` while DU `du` shares its band.
double cu_sinr(const D2dInstance& instance, std::size_t cu, std::size_t du);

/// Both QoS floors hold for the pair.
bool qos_ok(const D2dInstance& instance, std::size_t du, std::size_t cu);

enum class CuMode { Payment, Interference };

/// DUs rank CUs by rate (descending), CUs rank DUs by payment (descending)
/// or interference (ascending). Pairs failing QoS are dropped; ties go to
/// the lower index.
ValidatedProfile d2d_preferences(const D2dInstance& instance, CuMode mode);

double du_utility(const D2dInstance& instance, const Matching& matching, UserId du);
/// Payment received, or minus the interference suffered.
double cu_utility(const D2dInstance& instance, CuMode mode, ResourceId cu, UserId du);
double total_du_utility(const D2dInstance& instance, const Matching& matching);
/// DU rates plus the utilities of matched CUs.
double system_utility(const D2dInstance& instance, CuMode mode, const Matching& matching);

struct D2dResult {
  Matching matching;
  std::vector<double> du_utilities;
  double system_utility = 0.0;
  std::size_t proposals = 0;
  std::size_t rounds = 0;
};

/// DU-proposing deferred acceptance on the true preferences.
D2dResult d2d_match(const D2dInstance& instance, CuMode mode);

struct CheatReport {
  std::vector<UserId> cabal;        // misreporters plus every DU that strictly gains
  std::vector<UserId> accomplices;  // DUs whose reported list differs from the truth
  ValidatedProfile true_profile;
  ValidatedProfile reported_profile;
  Matching truthful_matching;
  Matching cheated_matching;
  /// Stable matching of the true profile with the largest total DU utility.
  Matching target_matching;
  /// Pairs of the cheated matching's true-profile instability.
  std::vector<BlockingPair> true_blocking_pairs;
  double truthful_du_utility = 0.0;
  double cheated_du_utility = 0.0;
  double truthful_system_utility = 0.0;
  double cheated_system_utility = 0.0;
  std::size_t candidates_evaluated = 0;
};

/// Upper bound on truncation profiles examined by `d2d_cheat`.
inline constexpr std::size_t kCheatSearchCap = 250000;

/// Coalition misreport by list truncation. The truthful DA outcome is the
/// baseline. Candidates are (a) truncating each DU's list right after its
/// partner in the true stable matching of largest total DU utility, and
/// (b) every profile in which each DU keeps some prefix of its true list.
/// A candidate is admissible when no DU ends up worse off in true utility
/// and system utility does not drop; the best admissible candidate by
/// total DU utility, then system utility, then fewest misreporters wins.
/// When the true stable matching is unique, the truthful outcome is
/// returned unchanged.
///
/// Throws InstanceTooLarge beyond the enumeration cap or when the search
/// space exceeds kCheatSearchCap, InvalidArgument with fewer than 2 DUs.
CheatReport d2d_cheat(const D2dInstance& instance, CuMode mode);

struct D2dGeneratorConfig {
  std::size_t n_cu = 5;
  std::size_t n_du = 5;
  double du_tx_power = 1.0;
  double cu_tx_power = 1.0;
  double noise_power = 0.1;
  double mean_direct_gain = 1.0;  // DU transmitter to DU receiver
  double mean_cross_gain = 0.1;   // CU transmitter to DU receiver, DU to base station
  double mean_cu_gain = 1.0;      // CU to base station
  double payment_min = 0.0;  // offer per (DU, CU) pair, uniform
  double payment_max = 3.0;
  double sinr_floor_cu_db = 0.0;
  double rate_floor_du = 0.5;
};

/// Rayleigh-faded links and independent uniform payment offers.
D2dInstance generate_instance(const D2dGeneratorConfig& config, std::uint64_t seed);

}  // namespace matchwire::d2d
