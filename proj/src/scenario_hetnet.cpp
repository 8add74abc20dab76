#include "matchwire/scenario_hetnet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "matchwire/deferred_acceptance.hpp"
#include "matchwire/error.hpp"

namespace matchwire::hetnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
  if (!ok) throw MatchError(ErrorCode::InvalidArgument, "hetnet instance: " + what);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// ln erfc(x) for x >= 0, switching to the asymptotic series before erfc
// underflows.
double log_erfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  const double x2 = x * x;
  return -x2 - std::log(x * std::sqrt(M_PI)) + std::log1p(-1.0 / (2.0 * x2) + 3.0 / (4.0 * x2 * x2));
}

double offered_load(const HetNetInstance& in, std::span<const UserId> tenants, UserId joining) {
  double load = in.load_rate[joining.index];
  for (UserId t : tenants) {
    if (t != joining) load += in.load_rate[t.index];
  }
  return load;
}

class HetNetContext : public UtilityContext {
 public:
  HetNetContext(const HetNetInstance& in, bool worst_case) : in_(in), worst_case_(worst_case) {
    const std::size_t nu = in.n_users, ns = in.n_sbs;
    ber_term_.assign(nu * ns, 0.0);
    station_score_.assign(nu * ns, kUnacceptable);
    for (std::size_t u = 0; u < nu; ++u) {
      double best = -kInf;
      for (std::size_t s = 0; s < ns; ++s) {
        ber_term_[u * ns + s] = neg_log10_ber(sinr(in, u, s), in.modulation);
        if (acceptable_link(u, s)) best = std::max(best, std::log10(in.bias[s] * in.gain_of(u, s)));
      }
      for (std::size_t s = 0; s < ns; ++s) {
        if (acceptable_link(u, s)) station_score_[u * ns + s] = std::log10(in.bias[s] * in.gain_of(u, s)) - best;
      }
    }
    if (worst_case_) {
      // Heaviest loads first, to fill a station pessimistically.
      by_load_.resize(nu);
      for (std::size_t u = 0; u < nu; ++u) by_load_[u] = u;
      std::stable_sort(by_load_.begin(), by_load_.end(),
                       [&](std::size_t a, std::size_t b) { return in.load_rate[a] > in.load_rate[b]; });
    }
  }

  std::size_t n_users() const override { return in_.n_users; }
  std::size_t n_resources() const override { return in_.n_sbs; }

  double user_utility(UserId u, ResourceId s, const Matching& m) const override {
    if (!acceptable_link(u.index, s.index)) return kUnacceptable;
    const double load = worst_case_ ? worst_case_load(u, s) : offered_load(in_, m.users_of(s), u);
    const double w = in_.tradeoff_weight;
    const double ber = (1.0 - w) * ber_term_[u.index * in_.n_sbs + s.index];
    if (w == 0.0) return ber;
    const double d = delay(in_.backhaul_capacity[s.index], load);
    if (d == kInf) return kUnacceptable;
    return ber - w * d;
  }

  double resource_utility(ResourceId s, UserId u, const Matching&) const override {
    return station_score_[u.index * in_.n_sbs + s.index];
  }

 private:
  bool acceptable_link(std::size_t u, std::size_t s) const { return sinr(in_, u, s) >= in_.sinr_threshold; }

  double worst_case_load(UserId u, ResourceId s) const {
    double load = in_.load_rate[u.index];
    int room = in_.sbs_quota[s.index] - 1;
    for (std::size_t i = 0; i < by_load_.size() && room > 0; ++i) {
      if (by_load_[i] == u.index) continue;
      load += in_.load_rate[by_load_[i]];
      --room;
    }
    return load;
  }

  HetNetInstance in_;
  bool worst_case_;
  std::vector<double> ber_term_;
  std::vector<double> station_score_;
  std::vector<std::size_t> by_load_;
};

}  // namespace

void validate(const HetNetInstance& in) {
  const std::size_t pairs = in.n_users * in.n_sbs;
  require(in.gain.size() == pairs, "gain table size");
  require(in.is_macro.size() == in.n_sbs, "is_macro size");
  require(in.sbs_quota.size() == in.n_sbs, "quota size");
  require(in.backhaul_capacity.size() == in.n_sbs, "capacity size");
  require(in.bias.size() == in.n_sbs, "bias size");
  require(in.load_rate.size() == in.n_users, "load size");
  require(in.tradeoff_weight >= 0.0 && in.tradeoff_weight <= 1.0, "tradeoff weight must be in [0, 1]");
  require(in.tx_power > 0.0 && in.noise_power > 0.0, "powers must be positive");
  for (double g : in.gain) require(g > 0.0 && std::isfinite(g), "gains must be finite and positive");
  for (int q : in.sbs_quota) require(q >= 1, "quotas must be >= 1");
  for (double c : in.backhaul_capacity) require(c > 0.0 && std::isfinite(c), "capacities must be positive");
  for (double l : in.load_rate) require(l > 0.0 && std::isfinite(l), "loads must be positive");
  for (double b : in.bias) require(b > 0.0 && std::isfinite(b), "bias must be positive");
}

double sinr(const HetNetInstance& in, std::size_t user, std::size_t sbs) {
  return in.tx_power * in.gain_of(user, sbs) / in.noise_power;
}

double neg_log10_ber(double sinr_linear, Modulation modulation) {
  const double g = std::max(sinr_linear, 0.0);
  // BPSK: 1/2 erfc(sqrt(g)).  Gray 16-QAM: 3/8 erfc(sqrt(g / 10)).
  const double scale = modulation == Modulation::Bpsk ? 0.5 : 0.375;
  const double x = modulation == Modulation::Bpsk ? std::sqrt(g) : std::sqrt(g / 10.0);
  return -(std::log10(scale) + log_erfc(x) / std::log(10.0));
}

double delay(double capacity, double load) {
  if (load >= capacity) return kInf;
  return 1.0 / (capacity - load);
}

std::unique_ptr<UtilityContext> hetnet_context(const HetNetInstance& in) {
  validate(in);
  return std::make_unique<HetNetContext>(in, false);
}

std::unique_ptr<UtilityContext> worst_case_context(const HetNetInstance& in) {
  validate(in);
  return std::make_unique<HetNetContext>(in, true);
}

Quotas quotas_of(const HetNetInstance& in) { return Quotas{std::vector<int>(in.n_users, 1), in.sbs_quota}; }

double average_user_utility(const HetNetInstance& in, const Matching& m) {
  if (in.n_users == 0) return 0.0;
  const auto ctx = hetnet_context(in);
  double total = 0.0;
  for (double v : user_utilities(*ctx, m)) total += v;
  return total / static_cast<double>(in.n_users);
}

HetNetResult hetnet_associate(const HetNetInstance& in, HetNetMethod method) {
  validate(in);
  HetNetResult out;
  const auto quotas = quotas_of(in);
  if (method == HetNetMethod::MatchingWithTransfers) {
    const auto bootstrap = worst_case_context(in);
    const auto profile = snapshot_preferences(*bootstrap, Matching(in.n_users, in.n_sbs), quotas);
    auto da = run_deferred_acceptance(profile, Proposer::Users);
    out.da_rounds = da.rounds;
    out.proposals = da.proposals;
    const auto truth = hetnet_context(in);
    auto tr = transfer_phase(da.matching, *truth, quotas, TransferPolicy::UserImproving);
    out.matching = std::move(tr.matching);
    out.transfers = std::move(tr.swaps);
    out.transfer_cap_hit = tr.hit_cap;
  } else {
    out.matching = Matching(in.n_users, in.n_sbs);
    std::vector<int> room = in.sbs_quota;
    for (std::size_t u = 0; u < in.n_users; ++u) {
      std::size_t best = in.n_sbs;
      for (std::size_t s = 0; s < in.n_sbs; ++s) {
        if (room[s] == 0 || sinr(in, u, s) < in.sinr_threshold) continue;
        if (best == in.n_sbs || in.gain_of(u, s) > in.gain_of(u, best)) best = s;
      }
      if (best == in.n_sbs) continue;
      out.matching.add(UserId{u}, ResourceId{best});
      --room[best];
    }
  }
  out.avg_user_utility = average_user_utility(in, out.matching);
  return out;
}

HetNetInstance generate_instance(const HetNetGeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.n_macro + cfg.n_small == 0) throw MatchError(ErrorCode::InvalidArgument, "hetnet generator: no stations");
  if (!(cfg.load_min > 0.0 && cfg.load_max >= cfg.load_min)) {
    throw MatchError(ErrorCode::InvalidArgument, "hetnet generator: need 0 < load_min <= load_max");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x4e7u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> pos(0.0, cfg.area_m);
  std::uniform_real_distribution<double> load(cfg.load_min, cfg.load_max);
  std::normal_distribution<double> shadow(0.0, cfg.shadowing_sigma_db);

  HetNetInstance in;
  in.n_sbs = cfg.n_macro + cfg.n_small;
  in.n_users = cfg.n_users;
  std::vector<std::pair<double, double>> sites;
  for (std::size_t i = 0; i < cfg.n_macro; ++i) {
    sites.emplace_back(cfg.area_m * (static_cast<double>(i) + 0.5) / static_cast<double>(cfg.n_macro), cfg.area_m / 2);
    in.is_macro.push_back(1);
    in.sbs_quota.push_back(cfg.macro_quota);
    in.backhaul_capacity.push_back(cfg.macro_capacity);
    in.bias.push_back(cfg.macro_bias);
  }
  for (std::size_t i = 0; i < cfg.n_small; ++i) {
    const double x = pos(rng);
    sites.emplace_back(x, pos(rng));
    in.is_macro.push_back(0);
    in.sbs_quota.push_back(cfg.small_quota);
    in.backhaul_capacity.push_back(cfg.small_capacity);
    in.bias.push_back(cfg.small_bias);
  }
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    const double ux = pos(rng);
    const double uy = pos(rng);
    for (std::size_t s = 0; s < in.n_sbs; ++s) {
      const double d_km = std::max(std::hypot(ux - sites[s].first, uy - sites[s].second), 10.0) / 1000.0;
      const double antenna = in.is_macro[s] ? cfg.macro_antenna_gain_db : cfg.small_antenna_gain_db;
      const double loss_db = 128.1 + 37.6 * std::log10(d_km);
      in.gain.push_back(db_to_linear(antenna - loss_db + shadow(rng)));
    }
    in.load_rate.push_back(load(rng));
  }
  in.tx_power = db_to_linear(cfg.user_tx_power_dbm - 30.0);
  in.noise_power = db_to_linear(cfg.noise_dbm - 30.0);
  in.tradeoff_weight = cfg.tradeoff_weight;
  in.sinr_threshold = db_to_linear(cfg.sinr_threshold_db);
  in.modulation = cfg.modulation;
  validate(in);
  return in;
}

std::vector<ConvergenceRow> hetnet_convergence_curve(const HetNetGeneratorConfig& base,
                                                     const std::vector<std::size_t>& sizes,
                                                     const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw MatchError(ErrorCode::InvalidArgument, "convergence curve needs at least one seed");
  std::vector<ConvergenceRow> rows;
  for (std::size_t n : sizes) {
    HetNetGeneratorConfig cfg = base;
    cfg.n_users = n;
    ConvergenceRow row{n, 0.0, 0.0};
    for (std::uint64_t seed : seeds) {
      const auto res = hetnet_associate(generate_instance(cfg, seed), HetNetMethod::MatchingWithTransfers);
      row.mean_iterations += static_cast<double>(res.iterations());
      row.mean_transfers += static_cast<double>(res.transfers.size());
    }
    row.mean_iterations /= static_cast<double>(seeds.size());
    row.mean_transfers /= static_cast<double>(seeds.size());
    rows.push_back(row);
  }
  return rows;
}

double growth_exponent(const std::vector<ConvergenceRow>& rows) {
  if (rows.size() < 2) throw MatchError(ErrorCode::InvalidArgument, "need at least two sizes to fit an exponent");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.n_users));
    const double y = std::log(std::max(r.mean_iterations, 1e-12));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace matchwire::hetnet
