#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "matchwire/matching.hpp"
#include "matchwire/profile.hpp"

namespace matchwire {

inline constexpr double kUnacceptable = -std::numeric_limits<double>::infinity();

/// Matching-dependent utilities. Both functions must be pure; a value of
/// kUnacceptable marks the pair as unacceptable for that agent.
class UtilityContext {
 public:
  virtual ~UtilityContext() = default;
  virtual std::size_t n_users() const = 0;
  virtual std::size_t n_resources() const = 0;
  virtual double user_utility(UserId u, ResourceId r, const Matching& current) const = 0;
  virtual double resource_utility(ResourceId r, UserId u, const Matching& current) const = 0;
};

/// Context assembled from two callables.
class FunctionContext final : public UtilityContext {
 public:
  using UserFn = std::function<double(UserId, ResourceId, const Matching&)>;
  using ResourceFn = std::function<double(ResourceId, UserId, const Matching&)>;

  FunctionContext(std::size_t n_users, std::size_t n_resources, UserFn user_fn, ResourceFn resource_fn)
      : n_users_(n_users), n_resources_(n_resources), user_fn_(std::move(user_fn)), resource_fn_(std::move(resource_fn)) {}

  std::size_t n_users() const override { return n_users_; }
  std::size_t n_resources() const override { return n_resources_; }
  double user_utility(UserId u, ResourceId r, const Matching& m) const override { return user_fn_(u, r, m); }
  double resource_utility(ResourceId r, UserId u, const Matching& m) const override { return resource_fn_(r, u, m); }

 private:
  std::size_t n_users_;
  std::size_t n_resources_;
  UserFn user_fn_;
  ResourceFn resource_fn_;
};

struct Quotas {
  std::vector<int> user;
  std::vector<int> resource;

  static Quotas uniform(std::size_t n_users, std::size_t n_resources, int user_quota = 1, int resource_quota = 1) {
    return {std::vector<int>(n_users, user_quota), std::vector<int>(n_resources, resource_quota)};
  }
};

/// Strict profile induced by evaluating `context` against `current`: lists
/// sorted by utility (descending), ties by ascending partner index,
/// unacceptable pairs dropped. Throws NonFiniteUtility on NaN or +inf.
ValidatedProfile snapshot_preferences(const UtilityContext& context, const Matching& current, const Quotas& quotas);

/// Each user's total utility over its partners in `m` (0 when unmatched).
std::vector<double> user_utilities(const UtilityContext& context, const Matching& m);

/// Sum over matched pairs of both sides' utilities.
double social_welfare(const UtilityContext& context, const Matching& m);

/// Blocking pairs of `m` under the preferences it induces, plus its own
/// pairs that those preferences make unacceptable.
std::size_t induced_blocking_pairs(const UtilityContext& context, const Matching& m, const Quotas& quotas);

// --- iterative deferred acceptance -------------------------------------------

enum class Termination { Fixpoint, Cycle, Cap };

std::string to_string(Termination t);

struct IterationRecord {
  std::size_t iteration = 0;  // 0 is the starting matching
  Matching matching;
  std::vector<double> user_utilities;
  /// Blocking pairs of `matching` under the preferences it induces.
  std::size_t blocking_pairs = 0;
  double sum_utility = 0.0;
  std::size_t proposals = 0;
  std::size_t rounds = 0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  Termination termination = Termination::Cap;
  /// For Cycle: iteration at which the repeated matching first appeared.
  std::size_t cycle_start = 0;

  std::size_t iterations() const { return records.empty() ? 0 : records.back().iteration; }
  std::size_t total_proposals() const;
  std::size_t total_rounds() const;
};

struct IterativeResult {
  Matching matching;
  IterationTrace trace;
};

/// Re-snapshots preferences against the current matching and re-runs
/// user-proposing DA until the matching repeats. An immediate repeat is a
/// fixpoint; a repeat of an older matching is a cycle, in which case the
/// matching produced just before the repeat is returned. Stops after
/// `max_iterations` DA runs otherwise.
IterativeResult iterative_da(const UtilityContext& context, const Quotas& quotas, std::size_t max_iterations);

/// Row-per-iteration csv: iteration,blocking_pair_count,sum_utility,converged_flag
std::string trace_to_csv(const IterationTrace& trace);

// --- transfers ---------------------------------------------------------------

enum class TransferPolicy { UserImproving, PairImproving };

struct SwapRequest {
  UserId user;
  ResourceId from_resource;
  ResourceId to_resource;
  std::optional<UserId> evicted;
  double gain = 0.0;
};

/// Best admissible single-user transfer out of `m`, if any. Largest
/// mover gain wins; ties go to the smallest (user, from, to).
std::optional<SwapRequest> best_transfer(const Matching& m, const UtilityContext& context, const Quotas& quotas,
                                         TransferPolicy policy);

struct TransferResult {
  Matching matching;
  std::vector<SwapRequest> swaps;
  /// True if the transfer budget, not the absence of transfers, ended the phase.
  bool hit_cap = false;
};

/// Applies best admissible transfers until none remains or
/// |users|*|resources|*max_rounds transfers have been executed.
TransferResult transfer_phase(const Matching& start, const UtilityContext& context, const Quotas& quotas,
                              TransferPolicy policy, std::size_t max_rounds = 64);

/// True iff no user has an admissible UserImproving transfer.
bool exchange_stability_check(const Matching& m, const UtilityContext& context, const Quotas& quotas);

}  // namespace matchwire
