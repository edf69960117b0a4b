#include "alq/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "alq/error.hpp"

namespace alq {

using nlohmann::json;

namespace {

template <class T>
T field(const json& obj, const char* name) {
  if (!obj.contains(name)) throw ValidationError(std::string("missing field '") + name + "'");
  try {
    return obj.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad field '") + name + "': " + e.what());
  }
}

template <class T>
void optional_field(const json& obj, const char* name, T& target) {
  if (obj.contains(name)) target = field<T>(obj, name);
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
}

ScenarioConfig scenario_from_json(const json& obj) {
  if (!obj.is_object()) throw ValidationError("scenario entries must be JSON objects");
  static const char* known[] = {"id", "scenario_id", "a", "b", "n", "num_labels", "m_max", "realizations",
                                "seed", "alpha_grid"};
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok |= key == k;
    if (!ok) throw ValidationError("unknown scenario field '" + key + "'");
  }
  ScenarioConfig c;
  optional_field(obj, "scenario_id", c.id);
  optional_field(obj, "id", c.id);
  optional_field(obj, "a", c.a);
  optional_field(obj, "b", c.b);
  optional_field(obj, "n", c.n);
  optional_field(obj, "num_labels", c.num_labels);
  optional_field(obj, "m_max", c.m_max);
  optional_field(obj, "realizations", c.realizations);
  optional_field(obj, "seed", c.seed);
  if (obj.contains("alpha_grid")) {
    const auto& g = obj.at("alpha_grid");
    if (!g.is_object()) throw ValidationError("alpha_grid must be an object");
    optional_field(g, "beta_points", c.alpha_grid.beta_points);
    optional_field(g, "beta_max", c.alpha_grid.beta_max);
    optional_field(g, "beta_min_offset", c.alpha_grid.beta_min_offset);
    optional_field(g, "refine_rel_tol", c.alpha_grid.refine_rel_tol);
    optional_field(g, "alpha_points", c.alpha_grid.alpha_points);
    optional_field(g, "alpha_min", c.alpha_grid.alpha_min);
    optional_field(g, "alpha_max", c.alpha_grid.alpha_max);
  }
  c.validate();
  return c;
}

}  // namespace

GraphFile parse_graph_json(const std::string& text) {
  const json doc = parse(text);
  if (!doc.is_object()) throw ValidationError("graph file must be a JSON object");
  GraphFile g;
  g.params.n = field<int>(doc, "n");
  g.params.num_labels = field<int>(doc, "num_labels");
  g.params.q_in = field<double>(doc, "q_in");
  g.params.q_out = field<double>(doc, "q_out");
  optional_field(doc, "label_prior", g.params.label_prior);
  g.params.validate();
  g.obs = Observation(g.params.n);
  const auto edges = field<std::vector<std::vector<int>>>(doc, "edges");
  for (const auto& e : edges) {
    if (e.size() != 2) throw ValidationError("each edge must be a pair [i, j]");
    const int i = e[0], j = e[1];
    if (i < 0 || j >= g.params.n || i >= j) throw ValidationError("edges need 0 <= i < j < n");
    if (g.obs.has_edge(i, j)) throw ValidationError("duplicate edge");
    g.obs.set_edge(i, j);
  }
  return g;
}

GraphFile read_graph_file(const std::filesystem::path& path) { return parse_graph_json(read_text_file(path)); }

std::string graph_to_json(const GraphFile& graph) {
  nlohmann::ordered_json doc;
  doc["n"] = graph.params.n;
  doc["num_labels"] = graph.params.num_labels;
  doc["q_in"] = graph.params.q_in;
  doc["q_out"] = graph.params.q_out;
  if (!graph.params.label_prior.empty()) doc["label_prior"] = graph.params.label_prior;
  auto& edges = doc["edges"] = nlohmann::ordered_json::array();
  for (auto [i, j] : graph.obs.edges()) edges.push_back({i, j});
  return doc.dump() + "\n";
}

std::vector<ScenarioConfig> parse_scenarios_json(const std::string& text) {
  const json doc = parse(text);
  std::vector<ScenarioConfig> out;
  const json* list = &doc;
  if (doc.is_object() && doc.contains("scenarios")) list = &doc.at("scenarios");
  if (list->is_array()) {
    for (const auto& item : *list) out.push_back(scenario_from_json(item));
  } else {
    out.push_back(scenario_from_json(*list));
  }
  if (out.empty()) throw ValidationError("scenario file lists no scenarios");
  return out;
}

std::vector<ScenarioConfig> read_scenario_file(const std::filesystem::path& path) {
  return parse_scenarios_json(read_text_file(path));
}

std::string scenarios_to_json(const std::vector<ScenarioConfig>& scenarios) {
  nlohmann::ordered_json doc;
  auto& list = doc["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& c : scenarios) {
    const auto& g = c.alpha_grid;
    list.push_back({{"scenario_id", c.id},
                    {"a", c.a},
                    {"b", c.b},
                    {"n", c.n},
                    {"num_labels", c.num_labels},
                    {"m_max", c.m_max},
                    {"realizations", c.realizations},
                    {"seed", c.seed},
                    {"alpha_grid",
                     {{"beta_points", g.beta_points},
                      {"beta_max", g.beta_max},
                      {"beta_min_offset", g.beta_min_offset},
                      {"refine_rel_tol", g.refine_rel_tol},
                      {"alpha_points", g.alpha_points},
                      {"alpha_min", g.alpha_min},
                      {"alpha_max", g.alpha_max}}}});
  }
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace alq
