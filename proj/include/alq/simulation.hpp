#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alq/entropy_bounds.hpp"
#include "alq/sbm_model.hpp"

namespace alq {

struct RealizationResult {
  std::uint64_t index = 0;
  LabelConfig truth;
  int edge_count = 0;
  double map_prob = 0.0;
  bool perm_invariant = false;
  std::vector<BoundReport> reports;     // budgets 0..m_max
  std::vector<std::string> violations;  // "M=3: pc_exact <= renyi_upper"
  std::vector<double> ordered_posterior;  // filled only when requested
};

/// Per-budget means over realizations; *_se are standard errors of the mean.
struct AggregateRow {
  int budget = 0;
  double pc_exact_mean = 0.0;
  double pc_exact_se = 0.0;
  double renyi_upper_mean = 0.0;
  double renyi_lower_mean = 0.0;
  double ordered_lower_mean = 0.0;
  double ordered_upper_mean = 0.0;
  double gain_mean = 0.0;
  double gain_se = 0.0;
  double gain_ceiling_mean = 0.0;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<RealizationResult> realizations;
  std::vector<AggregateRow> rows;

  std::size_t violation_count() const;
  /// Smallest budget whose mean correct probability exceeds `threshold`.
  std::optional<int> smallest_budget_above(double threshold) const;
};

struct RunOptions {
  int threads = 1;
  /// Keep the ordered posterior of each realization; 0 keeps every entry.
  bool keep_posteriors = false;
  std::size_t posterior_top = 0;
};

/// One Monte Carlo draw: labels, graph, posterior, exact Pc for every
/// budget and all bounds. Uses random stream (seed, index).
RealizationResult run_realization(const ScenarioConfig& config, std::uint64_t index, const RunOptions& options = {});

/// Runs every realization (in parallel when options.threads > 1) and
/// aggregates in realization order, so results do not depend on the worker
/// count.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

enum class OutputFormat { kCsv, kJson };
OutputFormat parse_output_format(const std::string& name);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

void write_results_csv(std::ostream& out, std::span<const ScenarioResult> results);
void write_results_json(std::ostream& out, std::span<const ScenarioResult> results);
/// Ordered posteriors: scenario_id, realization, rank, posterior.
void write_posteriors_csv(std::ostream& out, std::span<const ScenarioResult> results);

/// Writes results.{csv,json}, metadata.json and, when posteriors were kept,
/// posteriors.csv under `dir`. Throws IoError on failure.
void emit_results(std::span<const ScenarioResult> results, const std::filesystem::path& dir, OutputFormat format);

}  // namespace alq
