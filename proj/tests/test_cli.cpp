#include <filesystem>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "alq/cli.hpp"
#include "alq/io.hpp"

using namespace alq;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "alq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "alq_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string example_graph() {
  const auto path = scratch() / "g2.json";
  write_text_file(path, R"({"n": 2, "num_labels": 2, "q_in": 0.6, "q_out": 0.4, "edges": []})");
  return path.string();
}

}  // namespace

TEST_CASE("pc on the two-item example") {
  const auto r = run({"pc", "--graph", example_graph(), "--m", "0"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pc_ssp: 0.3\n") != std::string::npos);
}

TEST_CASE("verify succeeds") {
  const auto r = run({"verify", "--trials", "10", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("all checks passed") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  const auto missing = run({"pc", "--m", "0"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("Usage") != std::string::npos);
  CHECK(run({"pc", "--graph", example_graph(), "--m", "0", "--bogus"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"pc", "--graph", example_graph(), "--m", "5"}).code == 1);
}

TEST_CASE("missing input files exit with 3") {
  CHECK(run({"pc", "--graph", "/nonexistent/g.json", "--m", "0"}).code == 3);
}

TEST_CASE("posterior, bounds and tree outputs") {
  const auto dir = scratch();
  const auto post = (dir / "post.csv").string();
  REQUIRE(run({"posterior", "--graph", example_graph(), "--out", post}).code == 0);
  const auto text = read_text_file(post);
  CHECK(text.rfind("rank,code,labels,posterior,phi\n1,1,10,0.3,1\n", 0) == 0);

  const auto bounds = (dir / "bounds.csv").string();
  REQUIRE(run({"bounds", "--graph", example_graph(), "--m-max", "2", "--out", bounds}).code == 0);
  const auto btext = read_text_file(bounds);
  CHECK(std::count(btext.begin(), btext.end(), '\n') == 4);

  const auto tree = (dir / "tree.json").string();
  REQUIRE(run({"tree", "--graph", example_graph(), "--m", "1", "--out", tree}).code == 0);
  CHECK(read_text_file(tree).find("\"next_item\": 0") != std::string::npos);
}

TEST_CASE("simulate writes csv and prints the default config") {
  const auto printed = run({"simulate", "--print-default-config"});
  CHECK(printed.code == 0);
  CHECK(parse_scenarios_json(printed.out).size() == 3);

  const auto dir = scratch();
  const auto config = (dir / "small.json").string();
  write_text_file(config, R"({"id": "tiny", "a": 2, "b": 0.15, "n": 7, "m_max": 3, "realizations": 3, "seed": 5})");
  const auto out = (dir / "sim").string();
  const auto r = run({"--threads", "2", "simulate", "--config", config, "--out", out});
  CHECK(r.code == 0);
  const auto csv = read_text_file(std::filesystem::path(out) / "results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
