#include "matchwire/scenario_cr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "matchwire/deferred_acceptance.hpp"
#include "matchwire/error.hpp"
#include "matchwire/stability.hpp"

namespace matchwire::cr {

namespace {

constexpr std::uint32_t kSensingStream = 0x5e115;
constexpr std::uint32_t kRandomStream = 0x7a4d0;
constexpr std::uint32_t kInstanceStream = 0x1c57a;

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
  return std::mt19937_64(seq);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void require(bool ok, const std::string& what) {
  if (!ok) throw MatchError(ErrorCode::InvalidArgument, "cr instance: " + what);
}

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
}

}  // namespace

void validate(const CrInstance& in) {
  const std::size_t pairs = in.n_su * in.n_pu;
  require(in.gain.size() == pairs, "gain table size");
  require(in.sensing_snr.size() == pairs, "sensing snr table size");
  require(in.pu_activity.size() == in.n_pu, "pu activity size");
  require(in.prior_active.size() == in.n_pu, "prior size");
  require(in.noise_power > 0.0 && std::isfinite(in.noise_power), "noise power must be positive");
  require(in.tx_power > 0.0 && std::isfinite(in.tx_power), "tx power must be positive");
  require(in.sensing_samples >= 1, "sensing samples must be >= 1");
  for (double g : in.gain) require(g > 0.0 && std::isfinite(g), "gains must be finite and positive");
  for (double s : in.sensing_snr) require(s >= 0.0 && std::isfinite(s), "sensing snr must be >= 0");
  for (double p : in.prior_active) require(p >= 0.0 && p <= 1.0, "prior must be in [0, 1]");
}

double posterior_inactive(double y, double prior_active, double snr, int samples) {
  const double p1 = prior_active;
  const double p0 = 1.0 - prior_active;
  if (p1 <= 0.0) return 1.0;
  if (p0 <= 0.0) return 0.0;
  const double n = static_cast<double>(samples);
  const double log0 = std::log(p0) + log_normal_pdf(y, 1.0, 1.0 / n);
  const double log1 = std::log(p1) + log_normal_pdf(y, 1.0 + snr, (1.0 + snr) * (1.0 + snr) / n);
  // p0 f0 / (p0 f0 + p1 f1) = 1 / (1 + exp(log1 - log0))
  return 1.0 / (1.0 + std::exp(log1 - log0));
}

SensingReport sense(const CrInstance& in, std::uint64_t seed) {
  validate(in);
  auto rng = stream(seed, kSensingStream);
  std::normal_distribution<double> unit(0.0, 1.0);
  SensingReport rep{in.n_su, in.n_pu, std::vector<double>(in.n_su * in.n_pu)};
  const double n = static_cast<double>(in.sensing_samples);
  for (std::size_t su = 0; su < in.n_su; ++su) {
    for (std::size_t pu = 0; pu < in.n_pu; ++pu) {
      const double snr = in.sensing_snr_of(su, pu);
      const bool busy = in.pu_activity[pu] == PuActivity::Active;
      const double mean = busy ? 1.0 + snr : 1.0;
      const double sd = (busy ? 1.0 + snr : 1.0) / std::sqrt(n);
      const double y = mean + sd * unit(rng);
      rep.confidence[su * in.n_pu + pu] = posterior_inactive(y, in.prior_active[pu], snr, in.sensing_samples);
    }
  }
  return rep;
}

double rate(const CrInstance& in, std::size_t su, std::size_t pu) {
  return std::log2(1.0 + in.gain_of(su, pu) * in.tx_power / in.noise_power);
}

std::unique_ptr<UtilityContext> sensing_context(const CrInstance& in, const SensingReport& report) {
  validate(in);
  if (report.n_su != in.n_su || report.n_pu != in.n_pu) {
    throw MatchError(ErrorCode::InvalidArgument, "sensing report does not match the instance");
  }
  std::vector<double> score(in.n_su * in.n_pu);
  for (std::size_t su = 0; su < in.n_su; ++su) {
    for (std::size_t pu = 0; pu < in.n_pu; ++pu) score[su * in.n_pu + pu] = report.at(su, pu) * rate(in, su, pu);
  }
  const std::size_t n_pu = in.n_pu;
  auto activity = in.pu_activity;
  return std::make_unique<FunctionContext>(
      in.n_su, in.n_pu,
      [score, n_pu](UserId su, ResourceId pu, const Matching&) { return score[su.index * n_pu + pu.index]; },
      [score, n_pu, activity](ResourceId pu, UserId su, const Matching&) {
        if (activity[pu.index] == PuActivity::Active) return kUnacceptable;
        return score[su.index * n_pu + pu.index];
      });
}

std::unique_ptr<UtilityContext> rate_context(const CrInstance& in) {
  validate(in);
  std::vector<double> r(in.n_su * in.n_pu);
  for (std::size_t su = 0; su < in.n_su; ++su) {
    for (std::size_t pu = 0; pu < in.n_pu; ++pu) r[su * in.n_pu + pu] = rate(in, su, pu);
  }
  const std::size_t n_pu = in.n_pu;
  return std::make_unique<FunctionContext>(
      in.n_su, in.n_pu, [r, n_pu](UserId su, ResourceId pu, const Matching&) { return r[su.index * n_pu + pu.index]; },
      [r, n_pu](ResourceId pu, UserId su, const Matching&) { return r[su.index * n_pu + pu.index]; });
}

ValidatedProfile cr_preferences(const CrInstance& in, const SensingReport& report) {
  const auto ctx = sensing_context(in, report);
  return snapshot_preferences(*ctx, Matching(in.n_su, in.n_pu), Quotas::uniform(in.n_su, in.n_pu));
}

double realized_sum_rate(const CrInstance& in, const Matching& m) {
  double total = 0.0;
  for (const auto& [su, pu] : m.pairs()) {
    if (in.pu_activity[pu.index] == PuActivity::Inactive) total += rate(in, su.index, pu.index);
  }
  return total;
}

CrResult cr_allocate(const CrInstance& in, CrMethod method, std::uint64_t seed) {
  validate(in);
  const auto quotas = Quotas::uniform(in.n_su, in.n_pu);
  const Matching empty(in.n_su, in.n_pu);
  CrResult out;
  switch (method) {
    case CrMethod::ModifiedDA:
    case CrMethod::ClassicalDA: {
      const auto ctx = method == CrMethod::ModifiedDA ? sensing_context(in, sense(in, seed)) : rate_context(in);
      const auto profile = snapshot_preferences(*ctx, empty, quotas);
      auto da = run_deferred_acceptance(profile, Proposer::Users);
      out.matching = std::move(da.matching);
      out.proposals = da.proposals;
      out.rounds = da.rounds;
      out.blocking_pairs = find_blocking_pairs(out.matching, profile).size();
      break;
    }
    case CrMethod::Random: {
      auto rng = stream(seed, kRandomStream);
      std::vector<std::size_t> sus(in.n_su);
      std::iota(sus.begin(), sus.end(), 0);
      std::vector<std::size_t> idle;
      for (std::size_t pu = 0; pu < in.n_pu; ++pu) {
        if (in.pu_activity[pu] == PuActivity::Inactive) idle.push_back(pu);
      }
      std::shuffle(sus.begin(), sus.end(), rng);
      std::shuffle(idle.begin(), idle.end(), rng);
      out.matching = empty;
      for (std::size_t i = 0; i < std::min(sus.size(), idle.size()); ++i) {
        out.matching.add(UserId{sus[i]}, ResourceId{idle[i]});
      }
      out.blocking_pairs = find_blocking_pairs(out.matching, cr_preferences(in, sense(in, seed))).size();
      break;
    }
  }
  out.sum_rate = realized_sum_rate(in, out.matching);
  return out;
}

CrInstance generate_instance(const CrGeneratorConfig& cfg, std::uint64_t seed) {
  if (cfg.n_su == 0 || cfg.n_pu == 0) throw MatchError(ErrorCode::InvalidArgument, "cr generator: empty side");
  if (!(cfg.prior_active >= 0.0 && cfg.prior_active <= 1.0)) {
    throw MatchError(ErrorCode::InvalidArgument, "cr generator: prior_active outside [0, 1]");
  }
  auto rng = stream(seed, kInstanceStream);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution busy(cfg.prior_active);

  CrInstance in;
  in.n_su = cfg.n_su;
  in.n_pu = cfg.n_pu;
  in.noise_power = db_to_linear(cfg.noise_dbm - 30.0);
  in.tx_power = db_to_linear(cfg.tx_power_dbm - 30.0);
  in.sensing_samples = cfg.sensing_samples;
  in.prior_active.assign(cfg.n_pu, cfg.prior_active);
  for (std::size_t pu = 0; pu < cfg.n_pu; ++pu) {
    in.pu_activity.push_back(busy(rng) ? PuActivity::Active : PuActivity::Inactive);
  }
  for (std::size_t i = 0; i < cfg.n_su * cfg.n_pu; ++i) {
    in.gain.push_back(db_to_linear(cfg.gain_mean_db + cfg.gain_sigma_db * unit(rng)));
    in.sensing_snr.push_back(db_to_linear(cfg.sensing_snr_db + cfg.sensing_snr_sigma_db * unit(rng)));
  }
  validate(in);
  return in;
}

CrInstance apply_state(const CrInstance& base, const DynamicState& state, double shadow_sigma_db) {
  if (state.discrete.size() != base.n_pu) {
    throw MatchError(ErrorCode::InvalidArgument, "dynamic state needs one discrete entry per PU");
  }
  CrInstance out = base;
  for (std::size_t pu = 0; pu < base.n_pu; ++pu) {
    out.pu_activity[pu] = state.discrete[pu] == 0 ? PuActivity::Inactive : PuActivity::Active;
  }
  if (!state.gains.empty()) {
    if (state.gains.size() != base.gain.size()) {
      throw MatchError(ErrorCode::InvalidArgument, "dynamic state needs one gain entry per (SU, PU) pair");
    }
    for (std::size_t i = 0; i < out.gain.size(); ++i) out.gain[i] *= db_to_linear(shadow_sigma_db * state.gains[i]);
  }
  return out;
}

}  // namespace matchwire::cr
