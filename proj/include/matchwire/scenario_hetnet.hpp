#pragma once

// Uplink cell association in a HetNet: users (user side) are matched to
// base stations (resource side, macro and small cells), each user to one
// station, each station up to its quota. Backhaul queueing delay couples
// the users that share a station.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "matchwire/externality.hpp"
#include "matchwire/matching.hpp"

namespace matchwire::hetnet {

enum class Modulation { Bpsk, Qam16 };

struct HetNetInstance {
  std::size_t n_users = 0;
  std::size_t n_sbs = 0;                 // macro cells included
  std::vector<char> is_macro;            // per station
  std::vector<double> gain;              // [user * n_sbs + sbs], linear
  double tx_power = 0.01;                // W, per user
  double noise_power = 1e-12;            // W
  std::vector<int> sbs_quota;
  std::vector<double> backhaul_capacity;  // packets per unit time
  std::vector<double> load_rate;          // per user, packets per unit time
  double tradeoff_weight = 0.5;           // 0 = BER only, 1 = delay only
  std::vector<double> bias;               // per station; > 1 favours small cells
  double sinr_threshold = 0.1;            // linear
  Modulation modulation = Modulation::Bpsk;

  double gain_of(std::size_t u, std::size_t s) const { return gain[u * n_sbs + s]; }
};

void validate(const HetNetInstance& instance);

double sinr(const HetNetInstance& instance, std::size_t user, std::size_t sbs);

/// -log10 of the uncoded bit error rate at the given SINR; accurate deep
/// into the tail where the BER itself underflows.
double neg_log10_ber(double sinr, Modulation modulation);

/// Queue residence time 1 / (capacity - offered load); +inf at or above
/// capacity.
double delay(double capacity, double offered_load);

/// True utilities. User: (1 - w) * (-log10 BER) - w * delay of the station
/// with the user added to its current tenants. Station: log10 of its biased
/// gain to the user relative to the user's best biased gain (0 for users
/// whose best biased station it is). Pairs under the SINR threshold, or
/// whose delay would be infinite while w > 0, are unacceptable.
std::unique_ptr<UtilityContext> hetnet_context(const HetNetInstance& instance);

/// Same as `hetnet_context`, except each user evaluates a station as if it
/// were full: itself plus the quota-1 heaviest other users.
std::unique_ptr<UtilityContext> worst_case_context(const HetNetInstance& instance);

Quotas quotas_of(const HetNetInstance& instance);

enum class HetNetMethod { MatchingWithTransfers, BestNeighbor };

struct HetNetResult {
  Matching matching;
  /// Mean true utility over all users; an unassociated user counts as 0.
  double avg_user_utility = 0.0;
  std::size_t da_rounds = 0;
  std::size_t proposals = 0;
  std::vector<SwapRequest> transfers;
  bool transfer_cap_hit = false;

  std::size_t iterations() const { return da_rounds + transfers.size(); }
};

double average_user_utility(const HetNetInstance& instance, const Matching& matching);

HetNetResult hetnet_associate(const HetNetInstance& instance, HetNetMethod method);

struct HetNetGeneratorConfig {
  double area_m = 1000.0;
  std::size_t n_macro = 2;
  std::size_t n_small = 10;
  std::size_t n_users = 50;
  double user_tx_power_dbm = 10.0;
  double noise_dbm = -90.0;
  double macro_antenna_gain_db = 10.0;
  double small_antenna_gain_db = 0.0;
  double shadowing_sigma_db = 4.0;
  int macro_quota = 18;
  int small_quota = 5;
  double macro_capacity = 30.0;
  double small_capacity = 8.0;
  double load_min = 0.5;
  double load_max = 1.5;
  double tradeoff_weight = 0.5;
  double small_bias = 2.0;
  double macro_bias = 1.0;
  double sinr_threshold_db = -10.0;
  Modulation modulation = Modulation::Bpsk;
};

/// Macro cells sit on a horizontal line through the centre of a square
/// area; small cells and users are uniform. Path loss 128.1 + 37.6 log10(d_km)
/// dB with log-normal shadowing.
HetNetInstance generate_instance(const HetNetGeneratorConfig& config, std::uint64_t seed);

struct ConvergenceRow {
  std::size_t n_users = 0;
  double mean_iterations = 0.0;
  double mean_transfers = 0.0;
};

/// MatchingWithTransfers iteration counts (DA rounds + executed transfers)
/// averaged over `seeds` for each user count.
std::vector<ConvergenceRow> hetnet_convergence_curve(const HetNetGeneratorConfig& base,
                                                     const std::vector<std::size_t>& sizes,
                                                     const std::vector<std::uint64_t>& seeds);

/// Least-squares slope of log(mean_iterations) against log(n_users).
double growth_exponent(const std::vector<ConvergenceRow>& rows);

}  // namespace matchwire::hetnet
