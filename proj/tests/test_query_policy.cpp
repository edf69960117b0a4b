#include <cmath>

#include "doctest.h"

#include "alq/error.hpp"
#include "alq/oracle.hpp"
#include "alq/posterior.hpp"
#include "alq/query_policy.hpp"

using namespace alq;

namespace {

PosteriorTable uniform_table(int n, int num_labels) {
  const auto count = static_cast<std::size_t>(std::pow(num_labels, n));
  std::vector<double> probs(count, 1.0 / static_cast<double>(count));
  return PosteriorTable::from_probabilities(n, num_labels, probs);
}

PosteriorTable random_table(std::uint64_t seed, int n, int num_labels) {
  RandomStream rng(seed, 0);
  SbmParams p{n, num_labels, 0.65, 0.2, {}};
  const auto truth = sample_labels(p, rng);
  return compute_posterior(p, sample_observation(p, truth, rng));
}

}  // namespace

TEST_CASE("uniform posterior over eight configurations") {
  const auto t = uniform_table(3, 2);
  const auto plan = build_plan(t, 1, LossKind::kBinary);
  CHECK(plan.root_value() == 0.25);
  CHECK(pc_ssp(plan, t) == 0.25);
  CHECK(al_gain(t, plan.root_value()) == doctest::Approx(2.0));
  CHECK(plan.next_query(PartialLabeling(3)) == 0);
}

TEST_CASE("uniform posterior gives |L|^(M-N)") {
  for (int labels : {2, 3})
    for (int m = 0; m <= 3; ++m) {
      const auto t = uniform_table(3, labels);
      CHECK(build_plan(t, m, LossKind::kBinary).root_value() == doctest::Approx(std::pow(labels, m - 3)));
    }
}

TEST_CASE("two-item example at zero budget") {
  const SbmParams p{2, 2, 0.6, 0.4, {}};
  const auto t = compute_posterior(p, Observation(2));
  CHECK(build_plan(t, 0, LossKind::kBinary).root_value() == doctest::Approx(0.3));
  CHECK(build_plan(t, 1, LossKind::kBinary).root_value() == doctest::Approx(0.6));
  CHECK(build_plan(t, 2, LossKind::kBinary).root_value() == doctest::Approx(1.0));
}

TEST_CASE("plan lookups validate their state") {
  const auto t = uniform_table(3, 2);
  const auto plan = build_plan(t, 1, LossKind::kBinary);
  PartialLabeling full(3);
  full.reveal(2, 1);
  CHECK_THROWS_AS(plan.next_query(full), ValidationError);
  CHECK_THROWS_AS(build_plan(t, 4, LossKind::kBinary), ValidationError);
  CHECK_THROWS_AS(build_plan(t, 1, LossKind::kHamming, Objective::kCorrectMass), ValidationError);
}

TEST_CASE("dense sweep matches per-budget plans bit for bit") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto t = random_table(seed, 8, 2);
    const auto curve = pc_ssp_curve(t, 8);
    for (int m = 0; m <= 8; ++m) CHECK(curve[m] == build_plan(t, m, LossKind::kBinary).root_value());
    const auto t3 = random_table(seed, 5, 3);
    const auto curve3 = pc_ssp_curve(t3, 5);
    for (int m = 0; m <= 5; ++m) CHECK(curve3[m] == build_plan(t3, m, LossKind::kBinary).root_value());
  }
}

TEST_CASE("correct probability is monotone and bounded") {
  const auto t = random_table(9, 7, 2);
  const auto curve = pc_ssp_curve(t, 7);
  CHECK(curve[0] == doctest::Approx(t.map_prob()));
  for (int m = 1; m <= 7; ++m) CHECK(curve[m] >= curve[m - 1]);
  CHECK(curve[7] == doctest::Approx(1.0));
}

TEST_CASE("adaptive policy dominates every batch policy") {
  const auto t = random_table(12, 6, 2);
  for (int m = 0; m <= 3; ++m) {
    const double adaptive = build_plan(t, m, LossKind::kBinary).root_value();
    CHECK(oracle::best_batch_exhaustive(t, m).pc <= adaptive + 1e-12);
  }
}

TEST_CASE("hamming plan matches the generic Bayes risk") {
  for (std::uint64_t seed : {4u, 5u}) {
    const auto t = random_table(seed, 6, 2);
    for (int m = 0; m <= 2; ++m) {
      const auto plan = build_plan(t, m, LossKind::kHamming);
      for (const auto& node : realized_tree(plan)) {
        if (node.next_item >= 0) continue;
        CHECK(node.value == doctest::Approx(oracle::generic_bayes_risk(t, node.revealed, LossKind::kHamming)));
      }
    }
  }
}

TEST_CASE("realized tree has the expected shape") {
  const auto t = random_table(6, 5, 3);
  const auto plan = build_plan(t, 2, LossKind::kBinary);
  const auto nodes = realized_tree(plan);
  CHECK(nodes.size() == 1 + 3 + 9);
  CHECK(nodes[0].value == plan.root_value());
  double leaves = 0.0;
  for (const auto& n : nodes)
    if (n.next_item < 0) leaves += n.value;
  CHECK(leaves == doctest::Approx(plan.root_value()).epsilon(1e-12));
}

TEST_CASE("risk objective is the complement of correct mass") {
  const auto t = random_table(7, 6, 2);
  for (int m = 0; m <= 3; ++m) {
    const double risk = build_plan(t, m, LossKind::kBinary, Objective::kRisk).root_value();
    const double correct = build_plan(t, m, LossKind::kBinary).root_value();
    CHECK(risk == doctest::Approx(1.0 - correct).epsilon(1e-12));
  }
}

TEST_CASE("state cap is enforced") {
  const auto t = random_table(1, 8, 2);
  CHECK_THROWS_AS(build_plan(t, 4, LossKind::kBinary, std::nullopt, 10), ValidationError);
  CHECK(plan_state_count(3, 2, 1) == 1 + 3 * 2);
}
