#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "alq/sbm_model.hpp"

namespace alq {

struct GraphFile {
  SbmParams params;
  Observation obs;
};

/// {"n", "num_labels", "q_in", "q_out", "edges": [[i, j], ...]} with 0-based
/// i < j; an optional "label_prior" array overrides the uniform prior.
GraphFile parse_graph_json(const std::string& text);
GraphFile read_graph_file(const std::filesystem::path& path);
std::string graph_to_json(const GraphFile& graph);

/// A scenario file holds one ScenarioConfig object, an array of them, or
/// {"scenarios": [...]}. Missing fields take their defaults.
std::vector<ScenarioConfig> parse_scenarios_json(const std::string& text);
std::vector<ScenarioConfig> read_scenario_file(const std::filesystem::path& path);
std::string scenarios_to_json(const std::vector<ScenarioConfig>& scenarios);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace alq
