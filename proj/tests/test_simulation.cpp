#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "alq/io.hpp"
#include "alq/simulation.hpp"

using namespace alq;

namespace {

ScenarioConfig small_scenario() {
  ScenarioConfig c;
  c.id = "small";
  c.a = 2.0;
  c.b = 0.15;
  c.n = 9;
  c.m_max = 4;
  c.realizations = 6;
  c.seed = 42;
  return c;
}

std::string results_csv(const ScenarioResult& r) {
  std::ostringstream out;
  write_results_csv(out, std::span<const ScenarioResult>(&r, 1));
  return out.str();
}

}  // namespace

TEST_CASE("scenario aggregates one row per budget") {
  const auto res = run_scenario(small_scenario());
  CHECK(res.rows.size() == 5);
  CHECK(res.realizations.size() == 6);
  CHECK(res.violation_count() == 0);
  for (std::size_t m = 1; m < res.rows.size(); ++m) CHECK(res.rows[m].pc_exact_mean >= res.rows[m - 1].pc_exact_mean);
  const auto csv = results_csv(res);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.rfind("scenario_id,a,b,eta,M,pc_exact_mean,pc_exact_se,ub_thm2_mean,lb_thm3_mean,lb_thm4_mean,", 0) == 0);
}

TEST_CASE("results do not depend on the worker count") {
  const auto one = run_scenario(small_scenario(), RunOptions{1});
  const auto many = run_scenario(small_scenario(), RunOptions{4});
  CHECK(results_csv(one) == results_csv(many));
}

TEST_CASE("realizations are reproducible individually") {
  const auto c = small_scenario();
  const auto a = run_realization(c, 3);
  const auto b = run_realization(c, 3);
  CHECK(a.truth == b.truth);
  CHECK(a.map_prob == b.map_prob);
  CHECK(a.reports.back().pc_exact == b.reports.back().pc_exact);
}

TEST_CASE("emit writes results, posteriors and metadata") {
  RunOptions opts;
  opts.keep_posteriors = true;
  opts.posterior_top = 5;
  const std::vector<ScenarioResult> results = {run_scenario(small_scenario(), opts)};
  const auto dir = std::filesystem::temp_directory_path() / "alq_emit_test";
  std::filesystem::remove_all(dir);
  emit_results(results, dir, OutputFormat::kCsv);
  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "metadata.json"));
  const auto posts = read_text_file(dir / "posteriors.csv");
  CHECK(std::count(posts.begin(), posts.end(), '\n') == 1 + 6 * 5);
  const auto meta = nlohmann::json::parse(read_text_file(dir / "metadata.json"));
  CHECK(meta.contains("log_base"));

  emit_results(results, dir, OutputFormat::kJson);
  const auto doc = nlohmann::json::parse(read_text_file(dir / "results.json"));
  CHECK(doc.size() == 1);
  CHECK(doc[0]["rows"].size() == 5);
  std::filesystem::remove_all(dir);
}

TEST_CASE("doubles print in shortest round-trip form") {
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}
