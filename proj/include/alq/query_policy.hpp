#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alq/posterior.hpp"

namespace alq {

enum class LossKind { kBinary, kHamming };

/// binary: 1{estimate != truth}; hamming: number of mismatched items.
struct LossFunction {
  LossKind kind = LossKind::kBinary;
  double operator()(const LabelCodec& codec, std::uint64_t estimate, std::uint64_t truth) const;
};

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& name);

/// What the dynamic program optimises.
///  - kCorrectMass: maximise joint posterior mass of the MAP completion at
///    each leaf, summed over revealed labels (binary loss only). The root
///    value is the correct-classification probability.
///  - kRisk: minimise joint risk mass; the root value is the conditional
///    risk of the semi-supervised Bayes classifier.
enum class Objective { kCorrectMass, kRisk };

/// Default cap on the number of DP states held by a plan.
inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 27;

/// Number of (queried set, revealed labels) states with at most `budget`
/// queries: sum_m C(n, m) |L|^m.
std::uint64_t plan_state_count(int n, int num_labels, int budget);

/// Value map of the optimal adaptive query policy for one budget.
///
/// Values are stored in joint form: a state's value is its posterior mass
/// times its conditional value, so children combine by plain summation over
/// the revealed label. The value of a state depends only on which items were
/// queried and what labels came back, never on query order, so states are
/// keyed by (subset rank, label pattern) at each depth.
class QueryPlan {
 public:
  int n() const { return n_; }
  int num_labels() const { return num_labels_; }
  int budget() const { return budget_; }
  LossKind loss() const { return loss_; }
  Objective objective() const { return objective_; }
  double root_value() const { return levels_[0][0]; }
  std::uint64_t state_count() const;

  /// Joint value of a state; throws ValidationError if it has more than
  /// `budget()` revealed items.
  double value(const PartialLabeling& revealed) const;

  /// Optimal next item from a state with fewer than `budget()` revealed
  /// items; the smallest index wins ties.
  int next_query(const PartialLabeling& revealed) const;

 private:
  friend QueryPlan build_plan(const PosteriorTable&, int, LossKind, std::optional<Objective>, std::uint64_t);

  std::uint64_t subset_rank(std::uint32_t mask) const;
  std::uint64_t pattern_code(const PartialLabeling& revealed) const;
  void check_state(const PartialLabeling& revealed) const;

  int n_ = 0;
  int num_labels_ = 0;
  int budget_ = 0;
  LossKind loss_ = LossKind::kBinary;
  Objective objective_ = Objective::kCorrectMass;
  std::vector<std::vector<std::uint64_t>> binom_;
  std::vector<std::uint64_t> label_powers_;
  std::vector<std::vector<double>> levels_;
  std::vector<std::vector<std::int8_t>> choices_;
};

/// Builds the optimal adaptive policy for `budget` queries. The objective
/// defaults to kCorrectMass for binary loss and kRisk for hamming loss.
QueryPlan build_plan(const PosteriorTable& table, int budget, LossKind loss,
                     std::optional<Objective> objective = std::nullopt,
                     std::uint64_t state_cap = kDefaultStateCap);

inline int next_query(const QueryPlan& plan, const PartialLabeling& revealed) {
  return plan.next_query(revealed);
}

/// One node of the realised decision tree.
struct DecisionNode {
  PartialLabeling revealed;
  int next_item = -1;  // -1 at leaves
  double value = 0.0;  // joint value from the plan
  std::vector<std::size_t> children;
};

/// All |L|^0 + ... + |L|^M nodes reachable under the plan, root first.
std::vector<DecisionNode> realized_tree(const QueryPlan& plan);

/// Correct-classification probability of the plan's policy, summed over its
/// |L|^M leaves with an independent consistent-max scan at each leaf.
double pc_ssp(const QueryPlan& plan, const PosteriorTable& table);

/// Optimal correct-classification probability for every budget 0..m_max.
/// Uses a dense (|L|+1)^n state array when it fits the state cap; values are
/// bit-identical to build_plan(table, M, kBinary).root_value().
std::vector<double> pc_ssp_curve(const PosteriorTable& table, int m_max,
                                 std::uint64_t state_cap = kDefaultStateCap);

/// Correct-classification probability when exactly `items` are queried up
/// front (non-adaptive baseline).
double pc_batch(const PosteriorTable& table, std::span<const int> items);

/// Active learning gain: semi-supervised over unsupervised correct probability.
double al_gain(const PosteriorTable& table, double pc_ssp_value);

}  // namespace alq
