#include "matchwire/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include "matchwire/deferred_acceptance.hpp"
#include "matchwire/dynamic.hpp"
#include "matchwire/error.hpp"
#include "matchwire/externality.hpp"
#include "matchwire/scenario_cr.hpp"
#include "matchwire/scenario_d2d.hpp"
#include "matchwire/scenario_hetnet.hpp"
#include "matchwire/stability.hpp"

namespace matchwire::harness {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw MatchError(ErrorCode::ConfigError, what); }

// Reads typed keys out of a JSON object and rejects the ones nobody asked for.
class Fields {
 public:
  Fields(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) config_error(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!obj_.contains(key)) return;
    used_.insert(key);
    out = convert<T>(obj_.at(key), where_ + "." + key);
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return obj_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.count(key)) config_error(where_ + ": unknown key '" + key + "'");
    }
  }

  template <typename T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) config_error(where + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) config_error(where + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) config_error(where + ": expected a number");
      return v.get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        config_error(where + ": expected a non-negative integer");
      }
      return v.get<T>();
    } else {
      static_assert(std::is_integral_v<T>);
      if (!v.is_number_integer()) config_error(where + ": expected an integer");
      return v.get<T>();
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> used_;
};

// Inclusive size range; a seed picks a value by cycling through it.
struct SizeRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t span() const { return hi - lo + 1; }
};

SizeRange size_range(const json& v, const std::string& where) {
  if (v.is_array()) {
    if (v.size() != 2) config_error(where + ": expected [min, max]");
    SizeRange r{Fields::convert<std::size_t>(v[0], where), Fields::convert<std::size_t>(v[1], where)};
    if (r.lo == 0 || r.hi < r.lo) config_error(where + ": need 1 <= min <= max");
    return r;
  }
  const auto n = Fields::convert<std::size_t>(v, where);
  if (n == 0) config_error(where + ": must be >= 1");
  return {n, n};
}

void read_cr(Fields& f, cr::CrGeneratorConfig& c) {
  f.get("n_su", c.n_su);
  f.get("n_pu", c.n_pu);
  f.get("prior_active", c.prior_active);
  f.get("sensing_snr_db", c.sensing_snr_db);
  f.get("sensing_snr_sigma_db", c.sensing_snr_sigma_db);
  f.get("sensing_samples", c.sensing_samples);
  f.get("gain_mean_db", c.gain_mean_db);
  f.get("gain_sigma_db", c.gain_sigma_db);
  f.get("tx_power_dbm", c.tx_power_dbm);
  f.get("noise_dbm", c.noise_dbm);
}

struct CrParams {
  cr::CrGeneratorConfig gen;
};

struct HetNetParams {
  hetnet::HetNetGeneratorConfig gen;
};

struct D2dParams {
  d2d::D2dGeneratorConfig gen;
  SizeRange n_cu{5, 5};
  SizeRange n_du{5, 5};
  d2d::CuMode mode = d2d::CuMode::Payment;
};

struct DynamicParams {
  cr::CrGeneratorConfig gen;
  double p_stay = 0.9;
  double rho = 0.9;
  double shadow_sigma_db = 4.0;
  std::size_t epochs = 20;
  std::size_t max_iterations = 50;
};

using Params = std::variant<CrParams, HetNetParams, D2dParams, DynamicParams>;

Params parse_params(Scenario s, const json& doc) {
  Fields f(doc, "params");
  Params out;
  switch (s) {
    case Scenario::Cr: {
      CrParams p;
      read_cr(f, p.gen);
      out = p;
      break;
    }
    case Scenario::HetNet: {
      HetNetParams p;
      auto& g = p.gen;
      f.get("area_m", g.area_m);
      f.get("n_macro", g.n_macro);
      f.get("n_small", g.n_small);
      f.get("n_users", g.n_users);
      f.get("user_tx_power_dbm", g.user_tx_power_dbm);
      f.get("noise_dbm", g.noise_dbm);
      f.get("macro_antenna_gain_db", g.macro_antenna_gain_db);
      f.get("small_antenna_gain_db", g.small_antenna_gain_db);
      f.get("shadowing_sigma_db", g.shadowing_sigma_db);
      f.get("macro_quota", g.macro_quota);
      f.get("small_quota", g.small_quota);
      f.get("macro_capacity", g.macro_capacity);
      f.get("small_capacity", g.small_capacity);
      f.get("load_min", g.load_min);
      f.get("load_max", g.load_max);
      f.get("tradeoff_weight", g.tradeoff_weight);
      f.get("small_bias", g.small_bias);
      f.get("macro_bias", g.macro_bias);
      f.get("sinr_threshold_db", g.sinr_threshold_db);
      if (f.has("modulation")) {
        const auto m = Fields::convert<std::string>(f.raw("modulation"), "params.modulation");
        if (m == "BPSK") {
          g.modulation = hetnet::Modulation::Bpsk;
        } else if (m == "QAM16") {
          g.modulation = hetnet::Modulation::Qam16;
        } else {
          config_error("params.modulation: expected BPSK or QAM16");
        }
      }
      if (g.n_macro + g.n_small == 0 || g.n_users == 0) config_error("params: need stations and users");
      out = p;
      break;
    }
    case Scenario::D2d: {
      D2dParams p;
      auto& g = p.gen;
      if (f.has("n_cu")) p.n_cu = size_range(f.raw("n_cu"), "params.n_cu");
      if (f.has("n_du")) p.n_du = size_range(f.raw("n_du"), "params.n_du");
      f.get("du_tx_power", g.du_tx_power);
      f.get("cu_tx_power", g.cu_tx_power);
      f.get("noise_power", g.noise_power);
      f.get("mean_direct_gain", g.mean_direct_gain);
      f.get("mean_cross_gain", g.mean_cross_gain);
      f.get("mean_cu_gain", g.mean_cu_gain);
      f.get("payment_min", g.payment_min);
      f.get("payment_max", g.payment_max);
      f.get("sinr_floor_cu_db", g.sinr_floor_cu_db);
      f.get("rate_floor_du", g.rate_floor_du);
      if (f.has("cu_mode")) {
        const auto m = Fields::convert<std::string>(f.raw("cu_mode"), "params.cu_mode");
        if (m == "Payment") {
          p.mode = d2d::CuMode::Payment;
        } else if (m == "Interference") {
          p.mode = d2d::CuMode::Interference;
        } else {
          config_error("params.cu_mode: expected Payment or Interference");
        }
      }
      out = p;
      break;
    }
    case Scenario::Dynamic: {
      DynamicParams p;
      read_cr(f, p.gen);
      f.get("p_stay", p.p_stay);
      f.get("rho", p.rho);
      f.get("shadow_sigma_db", p.shadow_sigma_db);
      f.get("epochs", p.epochs);
      f.get("max_iterations", p.max_iterations);
      if (!(p.p_stay >= 0.0 && p.p_stay <= 1.0)) config_error("params.p_stay: must be in [0, 1]");
      if (!(p.rho >= 0.0 && p.rho <= 1.0)) config_error("params.rho: must be in [0, 1]");
      if (p.epochs == 0) config_error("params.epochs: must be >= 1");
      if (p.max_iterations == 0) config_error("params.max_iterations: must be >= 1");
      out = p;
      break;
    }
  }
  f.finish();
  return out;
}

// Shortest representation that parses back to the same double.
std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) config_error(where + ": bad number '" + s + "'");
  return v;
}

struct Outcome {
  double primary = 0.0;
  double secondary = 0.0;
  double iterations = 0.0;
  double proposals = 0.0;
  double blocking = 0.0;
};

Outcome run_cr(const CrParams& p, const std::string& method, std::uint64_t seed) {
  const auto in = cr::generate_instance(p.gen, seed);
  const auto kind = method == "ModifiedDA"    ? cr::CrMethod::ModifiedDA
                    : method == "ClassicalDA" ? cr::CrMethod::ClassicalDA
                                              : cr::CrMethod::Random;
  const auto res = cr::cr_allocate(in, kind, seed);
  double collisions = 0.0;
  for (const auto& [su, pu] : res.matching.pairs()) collisions += in.pu_activity[pu.index] == cr::PuActivity::Active;
  return {res.sum_rate, collisions, static_cast<double>(res.rounds), static_cast<double>(res.proposals),
          static_cast<double>(res.blocking_pairs)};
}

Outcome run_hetnet(const HetNetParams& p, const std::string& method, std::uint64_t seed) {
  const auto in = hetnet::generate_instance(p.gen, seed);
  const bool mwt = method == "MatchingWithTransfers";
  const auto res =
      hetnet::hetnet_associate(in, mwt ? hetnet::HetNetMethod::MatchingWithTransfers : hetnet::HetNetMethod::BestNeighbor);
  const auto ctx = hetnet::hetnet_context(in);
  return {res.avg_user_utility, static_cast<double>(res.transfers.size()),
          mwt ? static_cast<double>(res.iterations()) : 1.0, static_cast<double>(res.proposals),
          static_cast<double>(induced_blocking_pairs(*ctx, res.matching, hetnet::quotas_of(in)))};
}

Outcome run_d2d(const D2dParams& p, const std::string& method, std::uint64_t seed) {
  auto gen = p.gen;
  gen.n_cu = p.n_cu.lo + seed % p.n_cu.span();
  gen.n_du = p.n_du.lo + (seed / p.n_cu.span()) % p.n_du.span();
  const auto in = d2d::generate_instance(gen, seed);
  if (method == "Truthful") {
    const auto res = d2d::d2d_match(in, p.mode);
    const auto profile = d2d::d2d_preferences(in, p.mode);
    return {d2d::total_du_utility(in, res.matching), res.system_utility, static_cast<double>(res.rounds),
            static_cast<double>(res.proposals), static_cast<double>(find_blocking_pairs(res.matching, profile).size())};
  }
  const auto rep = d2d::d2d_cheat(in, p.mode);
  const auto da = run_deferred_acceptance(rep.reported_profile, Proposer::Users);
  return {rep.cheated_du_utility, rep.cheated_system_utility, static_cast<double>(da.rounds),
          static_cast<double>(da.proposals), static_cast<double>(rep.true_blocking_pairs.size())};
}

Outcome run_dynamic(const DynamicParams& p, const std::string& method, std::uint64_t seed) {
  const auto base = cr::generate_instance(p.gen, seed);
  DynamicState init;
  for (auto a : base.pu_activity) init.discrete.push_back(a == cr::PuActivity::Active ? 1 : 0);
  if (p.rho < 1.0) init.gains.assign(base.n_su * base.n_pu, 0.0);
  const double flip = 1.0 - p.p_stay;
  const auto model = TransitionModel::shared(base.n_pu, {{p.p_stay, flip}, {flip, p.p_stay}}, p.rho);
  const double sigma = p.shadow_sigma_db;
  ContextFactory factory = [base, seed, sigma](const DynamicState& state) {
    const auto in = cr::apply_state(base, state, sigma);
    return cr::sensing_context(in, cr::sense(in, seed + state.epoch));
  };
  MatcherConfig matcher;
  matcher.kind = method == "Iterative" ? MatcherKind::Iterative : MatcherKind::Canonical;
  matcher.quotas = Quotas::uniform(base.n_su, base.n_pu);
  matcher.max_iterations = p.max_iterations;
  const auto reports = run_horizon(init, model, factory, matcher, p.epochs, seed);

  Outcome out;
  for (const auto& r : reports) {
    out.primary += r.sum_utility;
    out.secondary += r.churn;
    out.iterations += static_cast<double>(r.iterations);
    out.proposals += static_cast<double>(r.proposals);
  }
  out.primary /= static_cast<double>(reports.size());
  out.secondary = reports.size() > 1 ? out.secondary / static_cast<double>(reports.size() - 1) : 0.0;
  DynamicState last = init;
  for (std::size_t e = 1; e < p.epochs; ++e) last = advance(last, model, seed);
  const auto ctx = factory(last);
  out.blocking = static_cast<double>(induced_blocking_pairs(*ctx, reports.back().matching, matcher.quotas));
  return out;
}

MetricRow summarize(const std::string& scenario, const std::string& method, const std::vector<MetricRow>& rows) {
  MetricRow s;
  s.scenario = scenario;
  s.method = method;
  s.seed = "mean";
  const double n = static_cast<double>(rows.size());
  auto mean = [&](double MetricRow::*field) {
    double total = 0.0;
    for (const auto& r : rows) total += r.*field;
    return total / n;
  };
  auto stderr_of = [&](double MetricRow::*field, double m) {
    if (rows.size() < 2) return 0.0;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r.*field - m) * (r.*field - m);
    return std::sqrt(ss / (n - 1.0) / n);
  };
  s.primary_metric = mean(&MetricRow::primary_metric);
  s.secondary_metric = mean(&MetricRow::secondary_metric);
  s.iterations = mean(&MetricRow::iterations);
  s.proposals = mean(&MetricRow::proposals);
  s.blocking_pairs_final = mean(&MetricRow::blocking_pairs_final);
  s.wall_time = mean(&MetricRow::wall_time);
  s.primary_metric_stderr = stderr_of(&MetricRow::primary_metric, s.primary_metric);
  s.secondary_metric_stderr = stderr_of(&MetricRow::secondary_metric, s.secondary_metric);
  return s;
}

std::vector<double MetricRow::*> numeric_fields() {
  return {&MetricRow::primary_metric, &MetricRow::secondary_metric, &MetricRow::iterations,
          &MetricRow::proposals,      &MetricRow::blocking_pairs_final, &MetricRow::wall_time,
          &MetricRow::primary_metric_stderr, &MetricRow::secondary_metric_stderr};
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Cr: return "cr";
    case Scenario::HetNet: return "hetnet";
    case Scenario::D2d: return "d2d";
    case Scenario::Dynamic: return "dynamic";
  }
  return "unknown";
}

std::string to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

Scenario parse_scenario(const std::string& name) {
  for (auto s : {Scenario::Cr, Scenario::HetNet, Scenario::D2d, Scenario::Dynamic}) {
    if (to_string(s) == name) return s;
  }
  config_error("unknown scenario '" + name + "' (expected cr, hetnet, d2d or dynamic)");
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  config_error("unknown output format '" + name + "' (expected csv or json)");
}

std::vector<std::string> scenario_methods(Scenario s) {
  switch (s) {
    case Scenario::Cr: return {"ModifiedDA", "ClassicalDA", "Random"};
    case Scenario::HetNet: return {"MatchingWithTransfers", "BestNeighbor"};
    case Scenario::D2d: return {"Truthful", "Cheating"};
    case Scenario::Dynamic: return {"Canonical", "Iterative"};
  }
  return {};
}

std::vector<std::uint64_t> ExperimentConfig::resolved_seeds() const {
  if (explicit_seeds) return seeds;
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < n_runs; ++i) out.push_back(base_seed + i);
  return out;
}

ExperimentConfig parse_config(const json& doc) {
  Fields f(doc, "config");
  ExperimentConfig c;
  if (!f.has("scenario")) config_error("config: missing 'scenario'");
  c.scenario = parse_scenario(Fields::convert<std::string>(f.raw("scenario"), "config.scenario"));
  if (f.has("params")) c.params = f.raw("params");
  if (f.has("methods")) {
    const auto& m = f.raw("methods");
    if (!m.is_array()) config_error("config.methods: expected an array of names");
    for (const auto& v : m) c.methods.push_back(Fields::convert<std::string>(v, "config.methods"));
  } else {
    c.methods = scenario_methods(c.scenario);
  }
  if (f.has("seeds")) {
    if (f.has("n_runs") || f.has("base_seed")) config_error("config: give either 'seeds' or 'base_seed'/'n_runs'");
    const auto& s = f.raw("seeds");
    if (!s.is_array()) config_error("config.seeds: expected an array of integers");
    for (const auto& v : s) c.seeds.push_back(Fields::convert<std::uint64_t>(v, "config.seeds"));
    c.explicit_seeds = true;
  }
  f.get("base_seed", c.base_seed);
  f.get("n_runs", c.n_runs);
  f.get("threads", c.threads);
  f.get("record_wall_time", c.record_wall_time);
  if (f.has("output")) {
    Fields out(f.raw("output"), "config.output");
    std::string path, format = "csv";
    out.get("path", path);
    out.get("format", format);
    out.finish();
    if (!path.empty()) c.output_path = path;
    c.format = parse_format(format);
  }
  f.finish();
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MatchError(ErrorCode::IoError, "cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    config_error(path + ": " + e.what());
  }
  return parse_config(doc);
}

void validate_config(const ExperimentConfig& c) {
  if (c.methods.empty()) config_error("config.methods: empty");
  const auto known = scenario_methods(c.scenario);
  std::set<std::string> seen;
  for (const auto& m : c.methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      config_error("config.methods: '" + m + "' is not a " + to_string(c.scenario) + " method");
    }
    if (!seen.insert(m).second) config_error("config.methods: '" + m + "' listed twice");
  }
  if (c.explicit_seeds ? c.seeds.empty() : c.n_runs == 0) config_error("config: n_runs must be >= 1");
  if (c.threads == 0) config_error("config.threads: must be >= 1");
  parse_params(c.scenario, c.params);
}

std::vector<MetricRow> MetricTable::summaries() const {
  std::vector<MetricRow> out;
  for (const auto& r : rows) {
    if (r.seed == "mean") out.push_back(r);
  }
  return out;
}

const MetricRow* MetricTable::summary(const std::string& method) const {
  for (const auto& r : rows) {
    if (r.seed == "mean" && r.method == method) return &r;
  }
  return nullptr;
}

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> cols = {
      "scenario",   "method",     "seed",
      "primary_metric", "secondary_metric", "iterations",
      "proposals",  "blocking_pairs_final", "wall_time",
      "primary_metric_stderr", "secondary_metric_stderr"};
  return cols;
}

MetricTable run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const Params params = parse_params(config.scenario, config.params);
  const auto seeds = config.resolved_seeds();
  const std::string scenario = to_string(config.scenario);

  struct Job {
    std::string method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& m : config.methods) {
    for (auto s : seeds) jobs.push_back({m, s});
  }
  std::vector<MetricRow> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());

  auto run_one = [&](std::size_t i) {
    const auto& job = jobs[i];
    try {
      const auto start = std::chrono::steady_clock::now();
      const Outcome o = std::visit(
          [&](const auto& p) -> Outcome {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, CrParams>) return run_cr(p, job.method, job.seed);
            if constexpr (std::is_same_v<P, HetNetParams>) return run_hetnet(p, job.method, job.seed);
            if constexpr (std::is_same_v<P, D2dParams>) return run_d2d(p, job.method, job.seed);
            if constexpr (std::is_same_v<P, DynamicParams>) return run_dynamic(p, job.method, job.seed);
          },
          params);
      MetricRow& r = rows[i];
      r.scenario = scenario;
      r.method = job.method;
      r.seed = std::to_string(job.seed);
      r.primary_metric = o.primary;
      r.secondary_metric = o.secondary;
      r.iterations = o.iterations;
      r.proposals = o.proposals;
      r.blocking_pairs_final = o.blocking;
      if (config.record_wall_time) {
        r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    } catch (const MatchError& e) {
      errors[i] = std::make_exception_ptr(MatchError(
          e.code(), scenario + " / " + job.method + " / seed " + std::to_string(job.seed) + ": " + e.detail()));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t workers = std::min(config.threads, jobs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) run_one(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  MetricTable table;
  table.rows = rows;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    const std::vector<MetricRow> group(rows.begin() + static_cast<std::ptrdiff_t>(m * seeds.size()),
                                       rows.begin() + static_cast<std::ptrdiff_t>((m + 1) * seeds.size()));
    table.rows.push_back(summarize(scenario, config.methods[m], group));
  }
  return table;
}

std::string to_csv(const MetricTable& table) {
  std::ostringstream os;
  const auto& cols = metric_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : table.rows) {
    os << r.scenario << ',' << r.method << ',' << r.seed;
    for (auto field : numeric_fields()) os << ',' << format_number(r.*field);
    os << '\n';
  }
  return os.str();
}

std::string to_json(const MetricTable& table) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  const auto& cols = metric_columns();
  const auto fields = numeric_fields();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json row;
    row[cols[0]] = r.scenario;
    row[cols[1]] = r.method;
    row[cols[2]] = r.seed;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const double v = r.*fields[i];
      // JSON has no literal for these; keep them readable and reversible.
      if (std::isfinite(v)) {
        row[cols[i + 3]] = v;
      } else {
        row[cols[i + 3]] = format_number(v);
      }
    }
    arr.push_back(std::move(row));
  }
  return arr.dump(2) + "\n";
}

MetricTable table_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("metric table: ") + e.what());
  }
  if (!doc.is_array()) config_error("metric table: expected an array of rows");
  const auto& cols = metric_columns();
  const auto fields = numeric_fields();
  MetricTable t;
  for (const auto& obj : doc) {
    Fields f(obj, "row");
    MetricRow r;
    f.get(cols[0], r.scenario);
    f.get(cols[1], r.method);
    f.get(cols[2], r.seed);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& name = cols[i + 3];
      if (!f.has(name)) config_error("row: missing '" + name + "'");
      const auto& v = f.raw(name);
      r.*fields[i] = v.is_string() ? parse_number(v.get<std::string>(), "row." + name)
                                   : Fields::convert<double>(v, "row." + name);
    }
    f.finish();
    t.rows.push_back(std::move(r));
  }
  return t;
}

MetricTable table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  const auto& cols = metric_columns();
  const auto fields = numeric_fields();
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(in, line) || split(line) != cols) config_error("metric table: bad csv header");
  MetricTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols.size()) config_error("metric table: row with " + std::to_string(cells.size()) + " cells");
    MetricRow r;
    r.scenario = cells[0];
    r.method = cells[1];
    r.seed = cells[2];
    for (std::size_t i = 0; i < fields.size(); ++i) r.*fields[i] = parse_number(cells[i + 3], cols[i + 3]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

void emit(const MetricTable& table, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw MatchError(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out << (format == OutputFormat::Csv ? to_csv(table) : to_json(table));
  out.flush();
  if (!out) throw MatchError(ErrorCode::IoError, "failed writing '" + path + "'");
}

}  // namespace matchwire::harness
