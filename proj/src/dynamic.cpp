#include "matchwire/dynamic.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "matchwire/deferred_acceptance.hpp"
#include "matchwire/error.hpp"
#include "matchwire/stability.hpp"

namespace matchwire {

TransitionModel TransitionModel::shared(std::size_t n_entities, std::vector<std::vector<double>> matrix, double rho) {
  return TransitionModel{std::vector<std::vector<std::vector<double>>>(n_entities, matrix), rho};
}

void validate_model(const TransitionModel& model, const DynamicState& state) {
  if (!(model.rho >= 0.0 && model.rho <= 1.0)) {
    throw MatchError(ErrorCode::InvalidArgument, "rho must lie in [0, 1]");
  }
  if (model.transition.size() != state.discrete.size()) {
    throw MatchError(ErrorCode::InvalidArgument, "one transition matrix per discrete entity is required");
  }
  for (std::size_t i = 0; i < model.transition.size(); ++i) {
    const auto& mat = model.transition[i];
    for (const auto& row : mat) {
      if (row.size() != mat.size()) {
        throw MatchError(ErrorCode::NonStochasticRow, "entity " + std::to_string(i) + ": matrix is not square");
      }
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw MatchError(ErrorCode::NonStochasticRow, "negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw MatchError(ErrorCode::NonStochasticRow,
                         "entity " + std::to_string(i) + ": row sums to " + std::to_string(sum));
      }
    }
    const int s = state.discrete[i];
    if (s < 0 || static_cast<std::size_t>(s) >= mat.size()) {
      throw MatchError(ErrorCode::InvalidArgument, "entity " + std::to_string(i) + " is outside its state space");
    }
  }
}

DynamicState advance(const DynamicState& state, const TransitionModel& model, std::uint64_t seed) {
  validate_model(model, state);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(state.epoch), static_cast<std::uint32_t>(state.epoch >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  DynamicState next = state;
  next.epoch = state.epoch + 1;
  for (std::size_t i = 0; i < state.discrete.size(); ++i) {
    const auto& row = model.transition[i][static_cast<std::size_t>(state.discrete[i])];
    const double x = unit(rng);
    double acc = 0.0;
    std::size_t to = row.size() - 1;
    for (std::size_t j = 0; j < row.size(); ++j) {
      acc += row[j];
      if (x < acc) {
        to = j;
        break;
      }
    }
    next.discrete[i] = static_cast<int>(to);
  }
  if (model.rho < 1.0) {
    std::normal_distribution<double> noise(0.0, 1.0);
    const double innovation = std::sqrt(1.0 - model.rho * model.rho);
    for (double& g : next.gains) g = model.rho * g + innovation * noise(rng);
  }
  return next;
}

double churn(const Matching& previous, const Matching& current) {
  std::size_t common = 0;
  for (const auto& [u, r] : current.pairs()) {
    if (u.index < previous.n_users() && r.index < previous.n_resources() && previous.contains(u, r)) ++common;
  }
  const std::size_t uni = previous.size() + current.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(uni - common) / static_cast<double>(uni);
}

std::vector<EpochReport> run_horizon(const DynamicState& initial, const TransitionModel& model,
                                     const ContextFactory& make_context, const MatcherConfig& matcher,
                                     std::size_t epochs, std::uint64_t seed) {
  if (epochs == 0) throw MatchError(ErrorCode::InvalidArgument, "epochs must be >= 1");
  validate_model(model, initial);

  std::vector<EpochReport> reports;
  DynamicState state = initial;
  for (std::size_t e = 0; e < epochs; ++e) {
    if (e > 0) state = advance(state, model, seed);
    const auto context = make_context(state);
    const std::size_t nu = context->n_users();
    const std::size_t nr = context->n_resources();

    EpochReport rep;
    rep.epoch = state.epoch;
    if (matcher.kind == MatcherKind::Canonical) {
      const auto profile = snapshot_preferences(*context, Matching(nu, nr), matcher.quotas);
      auto da = run_deferred_acceptance(profile, Proposer::Users);
      rep.matching = std::move(da.matching);
      rep.iterations = 1;
      rep.proposals = da.proposals;
    } else {
      auto res = iterative_da(*context, matcher.quotas, matcher.max_iterations);
      rep.matching = std::move(res.matching);
      rep.iterations = res.trace.iterations();
      rep.proposals = res.trace.total_proposals();
      rep.termination = res.trace.termination;
    }
    rep.user_utilities = user_utilities(*context, rep.matching);
    rep.sum_utility = social_welfare(*context, rep.matching);

    if (!reports.empty()) {
      const Matching& prev = reports.back().matching;
      rep.churn = churn(prev, rep.matching);
      const auto induced = snapshot_preferences(*context, prev, matcher.quotas);
      Matching carried = prev;
      for (const auto& [u, r] : prev.pairs()) {
        if (!induced.acceptable(u, r)) {
          carried.remove(u, r);
          ++rep.carried_over_broken_pairs;
        }
      }
      rep.carried_over_blocking_pairs = find_blocking_pairs(carried, induced).size();
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::string epochs_to_csv(const std::vector<EpochReport>& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,churn,sum_utility,carried_over_blocking_pairs\n";
  for (const auto& r : reports) {
    os << r.epoch << ',' << r.churn << ',' << r.sum_utility << ',' << r.carried_over_blocking_pairs << '\n';
  }
  return os.str();
}

}  // namespace matchwire
