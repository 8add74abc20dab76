#pragma once

// Seeded Monte-Carlo experiment runner over the scenario simulators.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace matchwire::harness {

enum class Scenario { Cr, HetNet, D2d, Dynamic };
enum class OutputFormat { Csv, Json };

std::string to_string(Scenario s);
std::string to_string(OutputFormat f);
/// Throws ConfigError on unknown names.
Scenario parse_scenario(const std::string& name);
OutputFormat parse_format(const std::string& name);

/// Method names accepted by each scenario, in their default order.
std::vector<std::string> scenario_methods(Scenario s);

struct ExperimentConfig {
  Scenario scenario = Scenario::Cr;
  /// Generator parameters for the scenario; omitted keys keep defaults.
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> methods;
  /// Explicit list, or derived as base_seed + i for i < n_runs.
  std::vector<std::uint64_t> seeds;
  std::uint64_t base_seed = 0;
  std::size_t n_runs = 1;
  bool explicit_seeds = false;
  std::optional<std::string> output_path;
  OutputFormat format = OutputFormat::Csv;
  std::size_t threads = 1;
  /// Off by default so that repeated runs are byte-identical.
  bool record_wall_time = false;

  std::vector<std::uint64_t> resolved_seeds() const;
};

/// Parses and validates a config document. Throws ConfigError with the
/// offending field in the message.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
/// Checks methods, seeds and scenario parameters without running anything.
void validate_config(const ExperimentConfig& config);

struct MetricRow {
  std::string scenario;
  std::string method;
  std::string seed;  // decimal seed, or "mean" on summary rows
  double primary_metric = 0.0;
  double secondary_metric = 0.0;
  double iterations = 0.0;
  double proposals = 0.0;
  double blocking_pairs_final = 0.0;
  double wall_time = 0.0;
  double primary_metric_stderr = 0.0;
  double secondary_metric_stderr = 0.0;

  bool operator==(const MetricRow&) const = default;
};

struct MetricTable {
  std::vector<MetricRow> rows;

  bool operator==(const MetricTable&) const = default;
  /// Summary rows only.
  std::vector<MetricRow> summaries() const;
  const MetricRow* summary(const std::string& method) const;
};

/// Column names in output order.
const std::vector<std::string>& metric_columns();

/// Metrics per scenario:
///   cr       primary = realized sum rate, secondary = SUs on busy channels
///   hetnet   primary = average user utility, secondary = executed transfers
///   d2d      primary = total DU utility, secondary = system utility
///   dynamic  primary = mean sum utility per epoch, secondary = mean churn
/// Data rows come grouped by method (config order), seeds in order, then one
/// summary row per method with means and standard errors.
MetricTable run_experiment(const ExperimentConfig& config);

std::string to_csv(const MetricTable& table);
std::string to_json(const MetricTable& table);
MetricTable table_from_json(const std::string& text);
MetricTable table_from_csv(const std::string& text);
/// Writes the table; throws IoError when the file cannot be written.
void emit(const MetricTable& table, OutputFormat format, const std::string& path);

}  // namespace matchwire::harness
