#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "alq/sbm_model.hpp"

namespace alq {

/// Labels revealed so far; unrevealed items hold -1.
class PartialLabeling {
 public:
  explicit PartialLabeling(int n = 0);

  int n() const { return static_cast<int>(labels_.size()); }
  int size() const { return count_; }
  bool is_revealed(int item) const { return labels_.at(item) >= 0; }
  int label(int item) const { return labels_.at(item); }
  /// Bitmask of revealed items.
  std::uint32_t mask() const;
  /// (item, label) pairs in ascending item order.
  std::vector<std::pair<int, int>> entries() const;

  void reveal(int item, int label);
  PartialLabeling with(int item, int label) const;

  /// True when the configuration agrees with every revealed label.
  bool consistent(std::uint64_t code, const LabelCodec& codec) const;

  friend bool operator==(const PartialLabeling&, const PartialLabeling&) = default;

 private:
  std::vector<int> labels_;
  int count_ = 0;
};

/// Exact posterior over all |L|^n label configurations.
///
/// `order()` lists codes by descending posterior with ties broken by
/// ascending code; rank 0 is the unsupervised MAP configuration.
class PosteriorTable {
 public:
  /// Normalises arbitrary log-weights (entries may be -inf).
  static PosteriorTable from_log_weights(int n, int num_labels, std::vector<double> log_weights);
  /// Takes a probability vector that already sums to 1 within 1e-9.
  static PosteriorTable from_probabilities(int n, int num_labels, std::span<const double> probs);

  int n() const { return codec_.n(); }
  int num_labels() const { return codec_.num_labels(); }
  std::uint64_t size() const { return probs_.size(); }
  const LabelCodec& codec() const { return codec_; }

  double log_prob(std::uint64_t code) const { return log_probs_[code]; }
  double prob(std::uint64_t code) const { return probs_[code]; }
  std::span<const double> log_probs() const { return log_probs_; }
  std::span<const double> probs() const { return probs_; }
  std::span<const std::uint32_t> order() const { return order_; }

  double prob_at_rank(std::size_t rank) const { return probs_[order_[rank]]; }
  double map_prob() const { return prob_at_rank(0); }
  LabelConfig map_config() const { return {order_[0]}; }

 private:
  PosteriorTable(int n, int num_labels, std::vector<double> log_probs, std::vector<double> probs = {});

  LabelCodec codec_;
  std::vector<double> log_probs_;
  std::vector<double> probs_;
  std::vector<std::uint32_t> order_;
};

/// Bayes posterior f(l | e) for the SBM, normalised with log-sum-exp.
PosteriorTable compute_posterior(const SbmParams& params, const Observation& obs);

/// Posterior of `config` divided by the MAP posterior.
double normalized_accuracy(const PosteriorTable& table, LabelConfig config);

/// Label distribution of `item` conditioned on the revealed labels. Throws
/// InvariantError when the revealed labels carry zero posterior mass.
std::vector<double> conditional_label_dist(const PosteriorTable& table, const PartialLabeling& revealed,
                                           int item);

/// Joint posterior mass of the revealed labels (summed in ascending code order).
double revealed_mass(const PosteriorTable& table, const PartialLabeling& revealed);

struct ConsistentMax {
  double value = 0.0;
  LabelConfig argmax;
};

/// Largest f(l | e) among configurations that agree with `revealed`; the
/// smallest code wins ties.
ConsistentMax max_joint_consistent(const PosteriorTable& table, const PartialLabeling& revealed);

/// True when every relabelling of the classes leaves each posterior value
/// within `tol`. All permutations are checked for |L| <= 4; larger label sets
/// are checked on a generating set (one transposition plus the full cycle).
bool is_permutation_invariant(const PosteriorTable& table, double tol = 1e-9);

}  // namespace alq
