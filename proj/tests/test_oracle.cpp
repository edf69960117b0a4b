#include "doctest.h"

#include "alq/oracle.hpp"

using namespace alq;

TEST_CASE("verify suite passes on random small instances") {
  oracle::VerifyOptions opts;
  opts.trials = 120;
  opts.seed = 3;
  const auto summary = oracle::run_verify_suite(opts);
  CHECK(summary.instances == 120);
  for (const auto& c : summary.checks) {
    INFO(c.name << " first failure: " << c.first_failure);
    CHECK(c.failed == 0);
    CHECK(c.passed > 0);
  }
  CHECK(summary.ok());
}

TEST_CASE("exhaustive search returns a policy achieving its value") {
  const SbmParams p{3, 2, 0.6, 0.4, {}};
  const auto t = compute_posterior(p, Observation(3));
  const auto best = oracle::enumerate_adaptive_policies(t, 1, LossKind::kBinary);
  REQUIRE(best.policy);
  CHECK(best.policy->item == 0);
  CHECK(best.policies_evaluated == 3);
  CHECK(best.value == build_plan(t, 1, LossKind::kBinary).root_value());
}

TEST_CASE("verify options are validated") {
  oracle::VerifyOptions opts;
  opts.max_n = 9;
  CHECK_THROWS(oracle::run_verify_suite(opts));
}
