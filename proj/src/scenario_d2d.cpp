#include "matchwire/scenario_d2d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "matchwire/deferred_acceptance.hpp"
#include "matchwire/error.hpp"

namespace matchwire::d2d {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw MatchError(ErrorCode::InvalidArgument, "d2d instance: " + what);
}

bool finite_non_negative(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x) && x >= 0.0; });
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

template <typename Id, typename Key>
std::vector<Id> ranked(std::size_t n, Key key, auto keep) {
  std::vector<Id> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep(i)) out.push_back(Id{i});
  }
  std::stable_sort(out.begin(), out.end(), [&](Id a, Id b) { return key(a.index) > key(b.index); });
  return out;
}

// One-to-one DU-proposing DA where DU d only proposes to the first cut[d]
// entries of its list. Returns the CU of each DU, or n_cu when unmatched.
class TruncatedDa {
 public:
  explicit TruncatedDa(const ValidatedProfile& p) : p_(p), holder_(p.n_resources()), next_(p.n_users()) {}

  const std::vector<std::size_t>& run(const std::vector<std::size_t>& cut) {
    const std::size_t nu = p_.n_users(), nr = p_.n_resources();
    partner_.assign(nu, nr);
    std::fill(holder_.begin(), holder_.end(), nu);
    std::fill(next_.begin(), next_.end(), 0);
    for (std::size_t start = 0; start < nu; ++start) {
      std::size_t d = start;
      while (d < nu) {
        const auto prefs = p_.user_prefs(UserId{d});
        if (next_[d] >= cut[d]) break;
        const std::size_t c = prefs[next_[d]++].index;
        const std::size_t held = holder_[c];
        if (held == nu) {
          holder_[c] = d;
          partner_[d] = c;
          d = nu;
        } else if (p_.resource_rank(ResourceId{c}, UserId{d}) < p_.resource_rank(ResourceId{c}, UserId{held})) {
          holder_[c] = d;
          partner_[d] = c;
          partner_[held] = nr;
          d = held;
        }
      }
    }
    return partner_;
  }

 private:
  const ValidatedProfile& p_;
  std::vector<std::size_t> holder_;
  std::vector<std::size_t> next_;
  std::vector<std::size_t> partner_;
};

struct Score {
  double du = 0.0;
  double system = 0.0;
  std::size_t misreporters = 0;
};

bool better(const Score& a, const Score& b) {
  if (!close(a.du, b.du)) return a.du > b.du;
  if (!close(a.system, b.system)) return a.system > b.system;
  return a.misreporters < b.misreporters;
}

}  // namespace

void validate(const D2dInstance& in) {
  require(in.n_cu > 0 && in.n_du > 0, "need at least one CU and one DU");
  require(in.du_rate.size() == in.n_du * in.n_cu, "du_rate size");
  require(in.du_payment.size() == in.n_du * in.n_cu, "du_payment size");
  require(in.cu_interference.size() == in.n_cu * in.n_du, "cu_interference size");
  require(in.cu_signal.size() == in.n_cu, "cu_signal size");
  require(finite_non_negative(in.du_rate) && finite_non_negative(in.du_payment) &&
              finite_non_negative(in.cu_interference) && finite_non_negative(in.cu_signal),
          "values must be finite and non-negative");
  require(std::isfinite(in.noise_power) && in.noise_power > 0.0, "noise power must be positive");
  require(std::isfinite(in.sinr_floor_cu) && in.sinr_floor_cu >= 0.0, "sinr floor");
  require(std::isfinite(in.rate_floor_du) && in.rate_floor_du >= 0.0, "rate floor");
}

double cu_sinr(const D2dInstance& in, std::size_t cu, std::size_t du) {
  return in.cu_signal[cu] / (in.noise_power + in.interference_of(cu, du));
}

bool qos_ok(const D2dInstance& in, std::size_t du, std::size_t cu) {
  return cu_sinr(in, cu, du) >= in.sinr_floor_cu && in.rate_of(du, cu) >= in.rate_floor_du;
}

ValidatedProfile d2d_preferences(const D2dInstance& in, CuMode mode) {
  validate(in);
  auto p = PreferenceProfile::empty(in.n_du, in.n_cu);
  for (std::size_t d = 0; d < in.n_du; ++d) {
    p.user_prefs[d] = ranked<ResourceId>(
        in.n_cu, [&](std::size_t c) { return in.rate_of(d, c); }, [&](std::size_t c) { return qos_ok(in, d, c); });
  }
  for (std::size_t c = 0; c < in.n_cu; ++c) {
    auto key = [&](std::size_t d) {
      return mode == CuMode::Payment ? in.payment_of(d, c) : -in.interference_of(c, d);
    };
    p.resource_prefs[c] = ranked<UserId>(in.n_du, key, [&](std::size_t d) { return qos_ok(in, d, c); });
  }
  return validate_profile(std::move(p));
}

double du_utility(const D2dInstance& in, const Matching& m, UserId du) {
  const auto cus = m.resources_of(du);
  return cus.empty() ? 0.0 : in.rate_of(du.index, cus.front().index);
}

double cu_utility(const D2dInstance& in, CuMode mode, ResourceId cu, UserId du) {
  return mode == CuMode::Payment ? in.payment_of(du.index, cu.index) : -in.interference_of(cu.index, du.index);
}

double total_du_utility(const D2dInstance& in, const Matching& m) {
  double total = 0.0;
  for (std::size_t d = 0; d < in.n_du; ++d) total += du_utility(in, m, UserId{d});
  return total;
}

double system_utility(const D2dInstance& in, CuMode mode, const Matching& m) {
  double total = total_du_utility(in, m);
  for (const auto& [u, r] : m.pairs()) total += cu_utility(in, mode, r, u);
  return total;
}

D2dResult d2d_match(const D2dInstance& in, CuMode mode) {
  const auto profile = d2d_preferences(in, mode);
  auto da = run_deferred_acceptance(profile, Proposer::Users);
  D2dResult out;
  out.matching = std::move(da.matching);
  out.proposals = da.proposals;
  out.rounds = da.rounds;
  for (std::size_t d = 0; d < in.n_du; ++d) out.du_utilities.push_back(du_utility(in, out.matching, UserId{d}));
  out.system_utility = system_utility(in, mode, out.matching);
  return out;
}

CheatReport d2d_cheat(const D2dInstance& in, CuMode mode) {
  if (in.n_du < 2) throw MatchError(ErrorCode::InvalidArgument, "cheating needs at least two DUs");
  CheatReport rep;
  rep.true_profile = d2d_preferences(in, mode);
  const auto& truth = rep.true_profile;
  const std::size_t nd = in.n_du;

  const auto stable = enumerate_stable_matchings(truth);
  rep.truthful_matching = deferred_acceptance(truth, Proposer::Users);
  rep.target_matching = rep.truthful_matching;
  double target_total = total_du_utility(in, rep.target_matching);
  for (const auto& m : stable) {
    const double t = total_du_utility(in, m);
    if (t > target_total && !close(t, target_total)) {
      target_total = t;
      rep.target_matching = m;
    }
  }

  std::vector<std::size_t> full(nd);
  std::size_t space = 1;
  for (std::size_t d = 0; d < nd; ++d) {
    full[d] = truth.user_prefs(UserId{d}).size();
    space *= full[d] + 1;
    if (space > kCheatSearchCap) {
      throw MatchError(ErrorCode::InstanceTooLarge, "truncation search space exceeds " + std::to_string(kCheatSearchCap));
    }
  }

  std::vector<double> base_utility(nd);
  for (std::size_t d = 0; d < nd; ++d) base_utility[d] = du_utility(in, rep.truthful_matching, UserId{d});
  const Score base{total_du_utility(in, rep.truthful_matching), system_utility(in, mode, rep.truthful_matching), 0};

  std::vector<std::size_t> best_cut = full;
  if (stable.size() > 1) {
    Score best = base;
    TruncatedDa da(truth);
    std::vector<std::size_t> cut(nd, 0);
    auto consider = [&](const std::vector<std::size_t>& c) {
      ++rep.candidates_evaluated;
      const auto& partner = da.run(c);
      Score s;
      for (std::size_t d = 0; d < nd; ++d) {
        const double u = partner[d] < in.n_cu ? in.rate_of(d, partner[d]) : 0.0;
        if (u < base_utility[d]) return;
        s.du += u;
        s.system += u;
        if (partner[d] < in.n_cu) s.system += cu_utility(in, mode, ResourceId{partner[d]}, UserId{d});
        s.misreporters += c[d] < full[d];
      }
      if (s.system < base.system && !close(s.system, base.system)) return;
      if (better(s, best)) {
        best = s;
        best_cut = c;
      }
    };
    // Truncation right after each DU's partner in the target matching.
    std::vector<std::size_t> target_cut(nd);
    for (std::size_t d = 0; d < nd; ++d) {
      const auto cus = rep.target_matching.resources_of(UserId{d});
      target_cut[d] = cus.empty() ? 0 : truth.user_rank(UserId{d}, cus.front()) + 1;
    }
    consider(target_cut);
    // Every prefix profile, odometer order.
    for (;;) {
      consider(cut);
      std::size_t d = 0;
      while (d < nd && cut[d] == full[d]) cut[d++] = 0;
      if (d == nd) break;
      ++cut[d];
    }
  }

  auto reported = truth.to_profile();
  for (std::size_t d = 0; d < nd; ++d) {
    reported.user_prefs[d].resize(best_cut[d]);
    if (best_cut[d] < full[d]) rep.accomplices.push_back(UserId{d});
  }
  rep.reported_profile = validate_profile(std::move(reported));
  rep.cheated_matching = deferred_acceptance(rep.reported_profile, Proposer::Users);
  for (std::size_t d = 0; d < nd; ++d) {
    const bool misreports = best_cut[d] < full[d];
    if (misreports || du_utility(in, rep.cheated_matching, UserId{d}) > base_utility[d]) rep.cabal.push_back(UserId{d});
  }
  rep.true_blocking_pairs = find_blocking_pairs(rep.cheated_matching, truth);
  rep.truthful_du_utility = base.du;
  rep.truthful_system_utility = base.system;
  rep.cheated_du_utility = total_du_utility(in, rep.cheated_matching);
  rep.cheated_system_utility = system_utility(in, mode, rep.cheated_matching);
  return rep;
}

D2dInstance generate_instance(const D2dGeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.n_cu == 0 || cfg.n_du == 0) throw MatchError(ErrorCode::InvalidArgument, "d2d generator: empty side");
  if (!(cfg.payment_min >= 0.0 && cfg.payment_max >= cfg.payment_min)) {
    throw MatchError(ErrorCode::InvalidArgument, "d2d generator: need 0 <= payment_min <= payment_max");
  }
  if (!(cfg.mean_direct_gain > 0 && cfg.mean_cross_gain > 0 && cfg.mean_cu_gain > 0)) {
    throw MatchError(ErrorCode::InvalidArgument, "d2d generator: mean gains must be positive");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xd2du};
  std::mt19937_64 rng(seq);
  auto fading = [&](double mean) { return std::exponential_distribution<double>(1.0 / mean)(rng); };
  std::uniform_real_distribution<double> payment(cfg.payment_min, cfg.payment_max);

  D2dInstance in;
  in.n_cu = cfg.n_cu;
  in.n_du = cfg.n_du;
  in.noise_power = cfg.noise_power;
  in.sinr_floor_cu = std::pow(10.0, cfg.sinr_floor_cu_db / 10.0);
  in.rate_floor_du = cfg.rate_floor_du;
  for (std::size_t c = 0; c < cfg.n_cu; ++c) in.cu_signal.push_back(cfg.cu_tx_power * fading(cfg.mean_cu_gain));
  in.du_rate.resize(cfg.n_du * cfg.n_cu);
  in.du_payment.resize(cfg.n_du * cfg.n_cu);
  in.cu_interference.resize(cfg.n_cu * cfg.n_du);
  for (std::size_t d = 0; d < cfg.n_du; ++d) {
    for (std::size_t c = 0; c < cfg.n_cu; ++c) {
      const double signal = cfg.du_tx_power * fading(cfg.mean_direct_gain);
      const double from_cu = cfg.cu_tx_power * fading(cfg.mean_cross_gain);
      const double r = std::log2(1.0 + signal / (cfg.noise_power + from_cu));
      in.du_rate[d * cfg.n_cu + c] = r;
      in.du_payment[d * cfg.n_cu + c] = payment(rng);
      in.cu_interference[c * cfg.n_du + d] = cfg.du_tx_power * fading(cfg.mean_cross_gain);
    }
  }
  validate(in);
  return in;
}

}  // namespace matchwire::d2d
