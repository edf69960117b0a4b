#include "doctest.h"

#include "alq/error.hpp"
#include "alq/io.hpp"

using namespace alq;

TEST_CASE("graph file round trip") {
  const auto g = parse_graph_json(R"({"n": 4, "num_labels": 2, "q_in": 0.6, "q_out": 0.1, "edges": [[0, 1], [2, 3]]})");
  CHECK(g.params.n == 4);
  CHECK(g.obs.edge_count() == 2);
  CHECK(g.obs.has_edge(1, 0));
  const auto again = parse_graph_json(graph_to_json(g));
  CHECK(again.obs == g.obs);
  CHECK(again.params.q_in == g.params.q_in);
}

TEST_CASE("graph files are validated") {
  CHECK_THROWS_AS(parse_graph_json("{"), ValidationError);
  CHECK_THROWS_AS(parse_graph_json(R"({"n": 3, "num_labels": 2, "q_in": 0.5, "q_out": 0.1})"), ValidationError);
  CHECK_THROWS_AS(parse_graph_json(R"({"n": 3, "num_labels": 2, "q_in": 0.5, "q_out": 0.1, "edges": [[0, 3]]})"),
                  ValidationError);
  CHECK_THROWS_AS(
      parse_graph_json(R"({"n": 3, "num_labels": 2, "q_in": 0.5, "q_out": 0.1, "edges": [[0, 1], [0, 1]]})"),
      ValidationError);
}

TEST_CASE("scenario files accept the three layouts") {
  CHECK(parse_scenarios_json(R"({"id": "x", "a": 3, "b": 0.15})").at(0).a == 3.0);
  CHECK(parse_scenarios_json(R"([{"id": "x"}, {"id": "y"}])").size() == 2);
  const auto round = parse_scenarios_json(scenarios_to_json(default_scenarios()));
  REQUIRE(round.size() == 3);
  CHECK(round[1].b == 0.15);
  CHECK(round[0].seed == default_scenarios()[0].seed);
  CHECK_THROWS_AS(parse_scenarios_json(R"({"id": "x", "bogus": 1})"), ValidationError);
  CHECK_THROWS_AS(parse_scenarios_json(R"({"scenarios": []})"), ValidationError);
}

TEST_CASE("missing files are IO errors") {
  CHECK_THROWS_AS(read_text_file("/nonexistent/alq/file.json"), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/alq/file.json", "x"), IoError);
}
