#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alq/posterior.hpp"
#include "alq/query_policy.hpp"
#include "alq/sbm_model.hpp"

// Brute-force references for the optimised paths. Nothing here memoises,
// works in log-space or uses pair counts.
namespace alq::oracle {

/// Direct Bayes product over all pairs in extended precision (n <= 4).
std::vector<double> brute_posterior(const SbmParams& params, const Observation& obs);

/// A deterministic adaptive policy: query `item`, then follow children[l]
/// when label l comes back. Leaves have item == -1.
struct PolicyTree {
  int item = -1;
  std::vector<std::shared_ptr<const PolicyTree>> children;
};

struct PolicySearchResult {
  double value = 0.0;
  std::shared_ptr<const PolicyTree> policy;
  std::uint64_t policies_evaluated = 0;
};

/// Terminal value of the Bayes classifier once `revealed` is known, in joint
/// form (posterior mass times conditional value), by direct scans in
/// ascending code order.
double terminal_value(const PosteriorTable& table, const PartialLabeling& revealed, LossKind loss,
                      Objective objective);

/// Bayes risk in joint form by minimising the expected loss over every
/// estimate of the unrevealed items (n <= 10). Independent of the per-item
/// decomposition used elsewhere for hamming loss.
double generic_bayes_risk(const PosteriorTable& table, const PartialLabeling& revealed, LossKind loss);

/// Enumerates every deterministic adaptive policy with `budget` queries and
/// returns the best one (n <= 5, budget <= 2). Ties keep the first policy in
/// enumeration order, which tries items in ascending index.
PolicySearchResult enumerate_adaptive_policies(const PosteriorTable& table, int budget, LossKind loss,
                                               std::optional<Objective> objective = std::nullopt);

struct BatchChoice {
  std::vector<int> items;
  double pc = 0.0;
};

/// Batch policy that queries the witness items of the separable prefix; its
/// correct-classification probability covers that whole prefix.
BatchChoice best_batch_gamma_policy(const PosteriorTable& table, int budget);

/// Best batch policy found by trying every subset of size `budget`.
BatchChoice best_batch_exhaustive(const PosteriorTable& table, int budget);

struct VerifyOptions {
  int trials = 200;
  std::uint64_t seed = 1;
  int max_n = 5;
  int max_m = 2;
};

struct VerifyCheck {
  std::string name;
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  std::string first_failure;
};

struct VerifySummary {
  int instances = 0;
  std::vector<VerifyCheck> checks;
  bool ok() const;
};

/// Random small instances cross-checked against every brute-force reference:
/// posterior products, exhaustive policy search (both loss kinds, exact
/// equality), leaf path sums, the dense Pc sweep, batch dominance and the
/// separable-prefix batch guarantee.
VerifySummary run_verify_suite(const VerifyOptions& options);

}  // namespace alq::oracle
