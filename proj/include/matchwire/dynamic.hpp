#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "matchwire/externality.hpp"
#include "matchwire/matching.hpp"

namespace matchwire {

/// Exogenous state at one epoch. `discrete[i]` is entity i's state index
/// (for PU activity: 0 = inactive, 1 = active). `gains` are zero-mean,
/// unit-variance Gauss-Markov processes; consumers map them onto physical
/// quantities (e.g. a shadowing offset in dB).
struct DynamicState {
  std::size_t epoch = 0;
  std::vector<int> discrete;
  std::vector<double> gains;

  bool operator==(const DynamicState&) const = default;
};

struct TransitionModel {
  /// transition[i][from][to] for entity i; each row must sum to 1.
  std::vector<std::vector<std::vector<double>>> transition;
  /// Gain correlation between consecutive epochs, in [0, 1].
  double rho = 1.0;

  /// Same chain for `n_entities` entities.
  static TransitionModel shared(std::size_t n_entities, std::vector<std::vector<double>> matrix, double rho = 1.0);
};

/// Throws NonStochasticRow / InvalidArgument if the model is malformed or
/// does not fit `state`.
void validate_model(const TransitionModel& model, const DynamicState& state);

/// One Markov step. Deterministic in (state, model, seed): the generator is
/// keyed by both the seed and the state's epoch.
DynamicState advance(const DynamicState& state, const TransitionModel& model, std::uint64_t seed);

enum class MatcherKind { Canonical, Iterative };

struct MatcherConfig {
  MatcherKind kind = MatcherKind::Canonical;
  Quotas quotas;
  std::size_t max_iterations = 50;
};

using ContextFactory = std::function<std::unique_ptr<UtilityContext>(const DynamicState&)>;

struct EpochReport {
  std::size_t epoch = 0;
  Matching matching;
  std::vector<double> user_utilities;
  double sum_utility = 0.0;
  /// |previous xor current| / |previous or current|; 0 on the first epoch.
  double churn = 0.0;
  /// Blocking pairs of the previous epoch's matching under this epoch's
  /// preferences, after dropping pairs that became unacceptable.
  std::size_t carried_over_blocking_pairs = 0;
  /// Previous pairs that are no longer acceptable at this epoch.
  std::size_t carried_over_broken_pairs = 0;
  std::size_t iterations = 0;
  std::size_t proposals = 0;
  Termination termination = Termination::Fixpoint;
};

/// Re-solves the matching at every epoch. Epoch 1 solves the initial
/// state; each later epoch first advances the state one step.
std::vector<EpochReport> run_horizon(const DynamicState& initial, const TransitionModel& model,
                                     const ContextFactory& make_context, const MatcherConfig& matcher,
                                     std::size_t epochs, std::uint64_t seed);

double churn(const Matching& previous, const Matching& current);

/// csv: epoch,churn,sum_utility,carried_over_blocking_pairs
std::string epochs_to_csv(const std::vector<EpochReport>& reports);

}  // namespace matchwire
