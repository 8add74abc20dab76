// matchwire: run seeded Monte-Carlo experiments from a JSON config.
//
//   matchwire run --config cr.json [--seed N] [--runs K] [--scenario S]
//                 [--format csv|json] [--threads T] --out table.csv

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "matchwire/error.hpp"
#include "matchwire/harness.hpp"

using namespace matchwire;

namespace {

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::string> scenario;
  std::optional<std::string> format;
  std::optional<std::size_t> threads;
  std::string out;
  bool quiet = false;
};

nlohmann::json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MatchError(ErrorCode::IoError, "cannot open config '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw MatchError(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

// Command-line overrides are applied to the document before validation, so
// they obey the same rules as the file.
void apply_overrides(nlohmann::json& doc, const RunOptions& opt) {
  if (!doc.is_object()) return;
  if (opt.scenario) doc["scenario"] = *opt.scenario;
  if (opt.seed || opt.runs) {
    if (doc.contains("seeds") && doc["seeds"].is_array() && !doc["seeds"].empty()) {
      const auto seeds = doc["seeds"];
      doc.erase("seeds");
      doc["base_seed"] = seeds.front();
      doc["n_runs"] = seeds.size();
    }
    if (opt.seed) doc["base_seed"] = *opt.seed;
    if (opt.runs) doc["n_runs"] = *opt.runs;
  }
  if (opt.threads) doc["threads"] = *opt.threads;
}

int run(const RunOptions& opt) {
  auto doc = read_document(opt.config);
  apply_overrides(doc, opt);
  auto config = harness::parse_config(doc);
  if (opt.format) config.format = harness::parse_format(*opt.format);
  const std::string out = !opt.out.empty() ? opt.out : config.output_path.value_or("");
  if (out.empty()) throw MatchError(ErrorCode::ConfigError, "no output path: pass --out or set output.path");

  const auto table = harness::run_experiment(config);
  harness::emit(table, config.format, out);
  if (!opt.quiet) {
    for (const auto& s : table.summaries()) {
      std::printf("%-22s primary %.6g +- %.2g  secondary %.6g +- %.2g\n", s.method.c_str(), s.primary_metric,
                  s.primary_metric_stderr, s.secondary_metric, s.secondary_metric_stderr);
    }
    std::printf("wrote %zu rows to %s\n", table.rows.size(), out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-sided matching experiments for wireless resource allocation"};
  app.require_subcommand(1);

  RunOptions opt;
  auto* cmd = app.add_subcommand("run", "Run an experiment config and write its metric table");
  cmd->add_option("--config", opt.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "Base seed; run i uses seed + i");
  cmd->add_option("--runs", opt.runs, "Number of seeded runs")->check(CLI::PositiveNumber);
  cmd->add_option("--scenario", opt.scenario, "Override the config's scenario")
      ->check(CLI::IsMember({"cr", "hetnet", "d2d", "dynamic"}));
  cmd->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", opt.out, "Output file (defaults to the config's output.path)");
  cmd->add_flag("-q,--quiet", opt.quiet, "Do not print summary lines");

  CLI11_PARSE(app, argc, argv);
  try {
    return run(opt);
  } catch (const std::exception& e) {
    std::cerr << "matchwire: " << e.what() << '\n';
    return 1;
  }
}
