#include "alq/cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "alq/entropy_bounds.hpp"
#include "alq/error.hpp"
#include "alq/io.hpp"
#include "alq/oracle.hpp"
#include "alq/posterior.hpp"
#include "alq/query_policy.hpp"
#include "alq/simulation.hpp"

namespace alq {

namespace {

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  bool print_default = false;
  bool dump_posteriors = false;
  std::size_t posterior_top = 0;
};

struct GraphArgs {
  std::string graph;
  std::string out;
  int budget = 0;
  std::string format = "csv";
  std::size_t top = 0;
  std::string loss = "binary";
};

bool wants_csv(const std::string& path, const std::string& format) {
  if (format == "json") return false;
  if (format == "csv") return !path.ends_with(".json");
  throw ValidationError("unknown output format '" + format + "' (expected csv or json)");
}

int cmd_simulate(const SimulateArgs& args, int threads, std::ostream& out, std::ostream& err) {
  if (args.print_default) {
    out << scenarios_to_json(default_scenarios());
    return 0;
  }
  if (args.config.empty()) throw ValidationError("simulate needs --config (or --print-default-config)");
  if (args.out.empty()) throw ValidationError("simulate needs --out");
  auto scenarios = read_scenario_file(args.config);
  const auto format = parse_output_format(args.format);

  RunOptions options;
  options.threads = threads;
  options.keep_posteriors = args.dump_posteriors;
  options.posterior_top = args.posterior_top;

  std::vector<ScenarioResult> results;
  std::size_t violations = 0;
  for (auto& scenario : scenarios) {
    if (args.seed) scenario.seed = *args.seed;
    results.push_back(run_scenario(scenario, options));
    const auto& res = results.back();
    violations += res.violation_count();
    for (const auto& r : res.realizations)
      for (const auto& v : r.violations) err << scenario.id << " realization " << r.index << ": " << v << '\n';
    const auto threshold = res.smallest_budget_above(0.75);
    out << scenario.id << ": " << res.realizations.size() << " realizations, smallest M with mean Pc > 0.75: "
        << (threshold ? std::to_string(*threshold) : std::string("none")) << '\n';
  }
  emit_results(results, args.out, format);
  if (violations > 0) {
    err << violations << " bound violation(s)\n";
    return 2;
  }
  return 0;
}

int cmd_bounds(const GraphArgs& args, std::ostream&) {
  const auto graph = read_graph_file(args.graph);
  if (args.budget < 0 || args.budget > graph.params.n) throw ValidationError("--m-max must lie in [0, n]");
  const auto table = compute_posterior(graph.params, graph.obs);
  const auto curve = pc_ssp_curve(table, args.budget);
  const BoundEvaluator evaluator(table, AlphaGrid{});

  std::vector<BoundReport> reports;
  std::size_t violations = 0;
  for (int m = 0; m <= args.budget; ++m) {
    reports.push_back(evaluator.report(m, curve[m]));
    violations += sandwich_violations(reports.back(), table.map_prob()).size();
  }

  std::ostringstream text;
  if (wants_csv(args.out, args.format)) {
    text << "M,pc_exact,ub_thm2,lb_thm3,lb_thm4,ub_thm4,gain,gain_ceiling,gamma_used,big_gamma,perm_invariant\n";
    for (const auto& r : reports)
      text << r.budget << ',' << format_double(r.pc_exact) << ',' << format_double(r.renyi_upper) << ','
           << format_double(r.renyi_lower) << ',' << format_double(r.ordered_lower) << ','
           << format_double(r.ordered_upper) << ',' << format_double(r.gain) << ',' << format_double(r.gain_ceiling)
           << ',' << r.lower_terms << ',' << r.separable << ',' << (r.perm_invariant ? 1 : 0) << '\n';
  } else {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : reports)
      doc.push_back({{"M", r.budget},
                     {"pc_exact", r.pc_exact},
                     {"ub_thm2", r.renyi_upper},
                     {"lb_thm3", r.renyi_lower},
                     {"lb_thm4", r.ordered_lower},
                     {"ub_thm4", r.ordered_upper},
                     {"gain", r.gain},
                     {"gain_ceiling", r.gain_ceiling},
                     {"gamma_used", r.lower_terms},
                     {"big_gamma", r.separable},
                     {"perm_invariant", r.perm_invariant}});
    text << doc.dump(2) << '\n';
  }
  write_text_file(args.out, text.str());
  return violations > 0 ? 2 : 0;
}

int cmd_posterior(const GraphArgs& args) {
  const auto graph = read_graph_file(args.graph);
  const auto table = compute_posterior(graph.params, graph.obs);
  const std::size_t rows = args.top == 0 ? table.size() : std::min<std::size_t>(args.top, table.size());
  std::ostringstream text;
  text << "rank,code,labels,posterior,phi\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const std::uint64_t code = table.order()[i];
    text << i + 1 << ',' << code << ',' << table.codec().to_string(code) << ',' << format_double(table.prob(code))
         << ',' << format_double(normalized_accuracy(table, LabelConfig{code})) << '\n';
  }
  write_text_file(args.out, text.str());
  return 0;
}

int cmd_tree(const GraphArgs& args) {
  const auto graph = read_graph_file(args.graph);
  if (args.budget < 0 || args.budget > graph.params.n) throw ValidationError("--m must lie in [0, n]");
  const auto table = compute_posterior(graph.params, graph.obs);
  const auto plan = build_plan(table, args.budget, parse_loss_kind(args.loss));
  const auto nodes = realized_tree(plan);

  nlohmann::ordered_json doc;
  doc["n"] = plan.n();
  doc["num_labels"] = plan.num_labels();
  doc["budget"] = plan.budget();
  doc["loss"] = to_string(plan.loss());
  doc["root_value"] = plan.root_value();
  auto& list = doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& node : nodes) {
    nlohmann::ordered_json revealed = nlohmann::ordered_json::object();
    for (auto [item, label] : node.revealed.entries()) revealed[std::to_string(item)] = label;
    list.push_back({{"revealed", revealed},
                    {"next_item", node.next_item < 0 ? nlohmann::ordered_json(nullptr)
                                                     : nlohmann::ordered_json(node.next_item)},
                    {"value", node.value},
                    {"children", node.children}});
  }
  write_text_file(args.out, doc.dump(2) + "\n");
  return 0;
}

int cmd_pc(const GraphArgs& args, std::ostream& out) {
  const auto graph = read_graph_file(args.graph);
  if (args.budget < 0 || args.budget > graph.params.n) throw ValidationError("--m must lie in [0, n]");
  const auto table = compute_posterior(graph.params, graph.obs);
  const double pc = pc_ssp_curve(table, args.budget).back();
  out << "pc_ssp: " << format_double(pc) << '\n';
  out << "gain: " << format_double(al_gain(table, pc)) << '\n';
  return 0;
}

int cmd_verify(const oracle::VerifyOptions& options, std::ostream& out) {
  const auto summary = oracle::run_verify_suite(options);
  out << "instances: " << summary.instances << '\n';
  out << std::left << std::setw(40) << "check" << std::right << std::setw(8) << "passed" << std::setw(8) << "failed"
      << '\n';
  for (const auto& c : summary.checks) {
    out << std::left << std::setw(40) << c.name << std::right << std::setw(8) << c.passed << std::setw(8) << c.failed;
    if (c.failed > 0) out << "  first: " << c.first_failure;
    out << '\n';
  }
  out << (summary.ok() ? "all checks passed" : "MISMATCH") << '\n';
  return summary.ok() ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact active-learning query policies and bounds for SBM classification", "alq"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads for simulate (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo reproduction of SBM scenarios");
  simulate->add_option("--config", sim.config, "Scenario JSON file");
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_option("--seed", sim.seed, "Override the seed of every scenario");
  simulate->add_option("--format", sim.format, "csv or json");
  simulate->add_flag("--print-default-config", sim.print_default, "Print the built-in scenarios and exit");
  simulate->add_flag("--dump-posteriors", sim.dump_posteriors, "Also write ordered posteriors");
  simulate->add_option("--posterior-top", sim.posterior_top, "Keep only the top K posteriors (0 = all)");

  GraphArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Exact Pc and every bound for budgets 0..K");
  bounds->add_option("--graph", bounds_args.graph, "Graph JSON file")->required();
  bounds->add_option("--m-max", bounds_args.budget, "Largest budget")->required();
  bounds->add_option("--out", bounds_args.out, "Output file")->required();
  bounds->add_option("--format", bounds_args.format, "csv or json");

  GraphArgs post_args;
  auto* posterior = app.add_subcommand("posterior", "Ordered posterior table");
  posterior->add_option("--graph", post_args.graph, "Graph JSON file")->required();
  posterior->add_option("--out", post_args.out, "Output CSV")->required();
  posterior->add_option("--top", post_args.top, "Keep only the top K rows (0 = all)");

  GraphArgs tree_args;
  auto* tree = app.add_subcommand("tree", "Optimal decision tree as JSON");
  tree->add_option("--graph", tree_args.graph, "Graph JSON file")->required();
  tree->add_option("--m", tree_args.budget, "Query budget")->required();
  tree->add_option("--out", tree_args.out, "Output JSON")->required();
  tree->add_option("--loss", tree_args.loss, "binary or hamming");

  GraphArgs pc_args;
  auto* pc = app.add_subcommand("pc", "Optimal correct-classification probability and gain");
  pc->add_option("--graph", pc_args.graph, "Graph JSON file")->required();
  pc->add_option("--m", pc_args.budget, "Query budget")->required();

  oracle::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "Cross-check fast paths against brute force");
  verify->add_option("--trials", verify_opts.trials, "Random instances");
  verify->add_option("--seed", verify_opts.seed, "Seed");
  verify->add_option("--max-n", verify_opts.max_n, "Largest number of items (<= 5)");
  verify->add_option("--max-m", verify_opts.max_m, "Largest budget (<= 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*simulate) return cmd_simulate(sim, threads, out, err);
    if (*bounds) return cmd_bounds(bounds_args, out);
    if (*posterior) return cmd_posterior(post_args);
    if (*tree) return cmd_tree(tree_args);
    if (*pc) return cmd_pc(pc_args, out);
    if (*verify) return cmd_verify(verify_opts, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace alq
