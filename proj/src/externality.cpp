#include "matchwire/externality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>
#include <utility>

#include "matchwire/deferred_acceptance.hpp"
#include "matchwire/error.hpp"
#include "matchwire/stability.hpp"

namespace matchwire {

namespace {

void check_dimensions(const UtilityContext& context, const Quotas& quotas) {
  if (quotas.user.size() != context.n_users() || quotas.resource.size() != context.n_resources()) {
    throw MatchError(ErrorCode::InvalidArgument, "quota vectors do not match the context dimensions");
  }
}

double checked(double value, const char* who, std::size_t a, std::size_t b) {
  if (std::isnan(value) || value == std::numeric_limits<double>::infinity()) {
    std::ostringstream os;
    os << who << " utility (" << a << ", " << b << ") is " << value;
    throw MatchError(ErrorCode::NonFiniteUtility, os.str());
  }
  return value;
}

template <typename Id>
std::vector<Id> ranked(std::vector<std::pair<double, std::size_t>>& scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<Id> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(Id{s.second});
  return out;
}

// Relative slack for "does not decrease" comparisons on sums of utilities.
bool not_below(double after, double before) {
  return after >= before - 1e-12 * std::max(1.0, std::abs(before));
}

double resource_total(const UtilityContext& ctx, const Matching& m, ResourceId r) {
  double total = 0.0;
  for (UserId t : m.users_of(r)) total += ctx.resource_utility(r, t, m);
  return total;
}

}  // namespace

ValidatedProfile snapshot_preferences(const UtilityContext& context, const Matching& current, const Quotas& quotas) {
  check_dimensions(context, quotas);
  const std::size_t nu = context.n_users();
  const std::size_t nr = context.n_resources();
  PreferenceProfile p;
  p.user_prefs.resize(nu);
  p.resource_prefs.resize(nr);
  p.user_quota = quotas.user;
  p.resource_quota = quotas.resource;

  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t u = 0; u < nu; ++u) {
    scored.clear();
    for (std::size_t r = 0; r < nr; ++r) {
      const double v = checked(context.user_utility(UserId{u}, ResourceId{r}, current), "user", u, r);
      if (v != kUnacceptable) scored.emplace_back(v, r);
    }
    p.user_prefs[u] = ranked<ResourceId>(scored);
  }
  for (std::size_t r = 0; r < nr; ++r) {
    scored.clear();
    for (std::size_t u = 0; u < nu; ++u) {
      const double v = checked(context.resource_utility(ResourceId{r}, UserId{u}, current), "resource", r, u);
      if (v != kUnacceptable) scored.emplace_back(v, u);
    }
    p.resource_prefs[r] = ranked<UserId>(scored);
  }
  return validate_profile(std::move(p));
}

std::vector<double> user_utilities(const UtilityContext& context, const Matching& m) {
  std::vector<double> out(m.n_users(), 0.0);
  for (const auto& [u, r] : m.pairs()) out[u.index] += context.user_utility(u, r, m);
  return out;
}

double social_welfare(const UtilityContext& context, const Matching& m) {
  double total = 0.0;
  for (const auto& [u, r] : m.pairs()) {
    total += context.user_utility(u, r, m) + context.resource_utility(r, u, m);
  }
  return total;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Fixpoint: return "fixpoint";
    case Termination::Cycle: return "cycle";
    case Termination::Cap: return "cap";
  }
  return "unknown";
}

std::size_t IterationTrace::total_proposals() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.proposals;
  return n;
}

std::size_t IterationTrace::total_rounds() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.rounds;
  return n;
}

std::size_t induced_blocking_pairs(const UtilityContext& context, const Matching& matching, const Quotas& quotas) {
  const auto induced = snapshot_preferences(context, matching, quotas);
  // Pairs that became unacceptable under their own induced preferences make
  // the matching malformed for that profile; count them as blocking too.
  Matching feasible = matching;
  std::size_t broken = 0;
  for (const auto& [u, r] : matching.pairs()) {
    if (!induced.acceptable(u, r)) {
      feasible.remove(u, r);
      ++broken;
    }
  }
  return broken + find_blocking_pairs(feasible, induced).size();
}

namespace {

IterationRecord make_record(const UtilityContext& context, const Quotas& quotas, std::size_t iteration,
                            Matching matching) {
  IterationRecord rec;
  rec.iteration = iteration;
  rec.user_utilities = user_utilities(context, matching);
  rec.sum_utility = social_welfare(context, matching);
  rec.blocking_pairs = induced_blocking_pairs(context, matching, quotas);
  rec.matching = std::move(matching);
  return rec;
}

}  // namespace

IterativeResult iterative_da(const UtilityContext& context, const Quotas& quotas, std::size_t max_iterations) {
  if (max_iterations == 0) throw MatchError(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  check_dimensions(context, quotas);

  IterativeResult out;
  auto& trace = out.trace;
  trace.records.push_back(make_record(context, quotas, 0, Matching(context.n_users(), context.n_resources())));

  for (std::size_t it = 1; it <= max_iterations; ++it) {
    const Matching& previous = trace.records.back().matching;
    const auto profile = snapshot_preferences(context, previous, quotas);
    auto da = run_deferred_acceptance(profile, Proposer::Users);

    if (da.matching == previous) {
      auto rec = make_record(context, quotas, it, std::move(da.matching));
      rec.proposals = da.proposals;
      rec.rounds = da.rounds;
      trace.records.push_back(std::move(rec));
      trace.termination = Termination::Fixpoint;
      out.matching = trace.records.back().matching;
      return out;
    }
    for (const auto& earlier : trace.records) {
      if (earlier.matching == da.matching) {
        trace.termination = Termination::Cycle;
        trace.cycle_start = earlier.iteration;
        out.matching = previous;
        return out;
      }
    }
    auto rec = make_record(context, quotas, it, std::move(da.matching));
    rec.proposals = da.proposals;
    rec.rounds = da.rounds;
    trace.records.push_back(std::move(rec));
  }
  trace.termination = Termination::Cap;
  out.matching = trace.records.back().matching;
  return out;
}

std::string trace_to_csv(const IterationTrace& trace) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,blocking_pair_count,sum_utility,converged_flag\n";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    const bool last = i + 1 == trace.records.size();
    os << r.iteration << ',' << r.blocking_pairs << ',' << r.sum_utility << ','
       << (last && trace.termination == Termination::Fixpoint ? 1 : 0) << '\n';
  }
  return os.str();
}

namespace {

struct Candidate {
  SwapRequest swap;
  Matching after;
};

std::optional<Candidate> try_transfer(const Matching& m, const UtilityContext& ctx, const Quotas& quotas,
                                      TransferPolicy policy, UserId u, ResourceId from, ResourceId to) {
  if (m.contains(u, to)) return std::nullopt;
  const double u_before = ctx.user_utility(u, from, m);
  const double r_score = ctx.resource_utility(to, u, m);
  if (r_score == kUnacceptable || ctx.user_utility(u, to, m) == kUnacceptable) return std::nullopt;

  Matching after = m;
  after.remove(u, from);
  std::optional<UserId> evicted;
  const auto tenants = m.users_of(to);
  if (tenants.size() >= static_cast<std::size_t>(quotas.resource[to.index])) {
    // Least preferred tenant; among equals the higher index leaves.
    UserId worst = tenants.front();
    double worst_score = ctx.resource_utility(to, worst, m);
    for (UserId t : tenants) {
      const double s = ctx.resource_utility(to, t, m);
      if (s < worst_score || (s == worst_score && t > worst)) {
        worst = t;
        worst_score = s;
      }
    }
    if (!(r_score > worst_score)) return std::nullopt;
    after.remove(worst, to);
    evicted = worst;
  }
  after.add(u, to);

  const double u_after = ctx.user_utility(u, to, after);
  if (!(u_after > u_before)) return std::nullopt;
  if (policy == TransferPolicy::PairImproving) {
    if (!not_below(resource_total(ctx, after, to), resource_total(ctx, m, to))) return std::nullopt;
    if (!not_below(social_welfare(ctx, after), social_welfare(ctx, m))) return std::nullopt;
  }
  return Candidate{SwapRequest{u, from, to, evicted, u_after - u_before}, std::move(after)};
}

std::optional<Candidate> best_candidate(const Matching& m, const UtilityContext& ctx, const Quotas& quotas,
                                        TransferPolicy policy) {
  std::optional<Candidate> best;
  for (const auto& [u, from] : m.pairs()) {
    for (std::size_t t = 0; t < m.n_resources(); ++t) {
      const ResourceId to{t};
      if (to == from) continue;
      auto c = try_transfer(m, ctx, quotas, policy, u, from, to);
      // Pairs are visited in (user, from, to) order, so keeping the first
      // maximum implements the tie rule.
      if (c && (!best || c->swap.gain > best->swap.gain)) best = std::move(c);
    }
  }
  return best;
}

}  // namespace

std::optional<SwapRequest> best_transfer(const Matching& m, const UtilityContext& context, const Quotas& quotas,
                                         TransferPolicy policy) {
  check_dimensions(context, quotas);
  auto c = best_candidate(m, context, quotas, policy);
  if (!c) return std::nullopt;
  return c->swap;
}

TransferResult transfer_phase(const Matching& start, const UtilityContext& context, const Quotas& quotas,
                              TransferPolicy policy, std::size_t max_rounds) {
  check_dimensions(context, quotas);
  if (start.n_users() != context.n_users() || start.n_resources() != context.n_resources()) {
    throw MatchError(ErrorCode::MalformedMatching, "matching dimensions differ from the context");
  }
  for (std::size_t r = 0; r < start.n_resources(); ++r) {
    if (start.users_of(ResourceId{r}).size() > static_cast<std::size_t>(quotas.resource[r])) {
      throw MatchError(ErrorCode::MalformedMatching, "resource " + std::to_string(r) + " exceeds its quota");
    }
  }

  TransferResult out{start, {}, false};
  const std::size_t budget = context.n_users() * context.n_resources() * max_rounds;
  while (true) {
    auto c = best_candidate(out.matching, context, quotas, policy);
    if (!c) return out;
    if (out.swaps.size() >= budget) {
      out.hit_cap = true;
      return out;
    }
    out.swaps.push_back(c->swap);
    out.matching = std::move(c->after);
  }
}

bool exchange_stability_check(const Matching& m, const UtilityContext& context, const Quotas& quotas) {
  return !best_transfer(m, context, quotas, TransferPolicy::UserImproving).has_value();
}

}  // namespace matchwire
