#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alq/posterior.hpp"
#include "alq/sbm_model.hpp"

namespace alq {

/// Renyi entropy (nats) of order alpha != 1. Zero atoms are skipped for
/// alpha > 0 and make the entropy +inf for alpha < 0.
double renyi_entropy(std::span<const double> dist, double alpha);

double shannon_entropy(std::span<const double> dist);

/// Renyi entropy of the posterior vector f(. | e).
double conditional_event_renyi(const PosteriorTable& table, double alpha);

/// Arimoto conditional entropy H_alpha(X|Y) of a joint pmf given as
/// joint[y][x]. Exposed as a utility; no bound below depends on it.
double arimoto_conditional_entropy(const std::vector<std::vector<double>>& joint, double alpha);

/// Log-spaced points from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

/// Cached log(sum_l f(l|e)^order) over the bound grids of one table.
class RenyiProfile {
 public:
  RenyiProfile(const PosteriorTable& table, const AlphaGrid& grid);

  const PosteriorTable& table() const { return *table_; }
  const AlphaGrid& grid() const { return grid_; }
  std::span<const double> betas() const { return betas_; }
  std::span<const double> beta_log_sums() const { return beta_log_sums_; }
  std::span<const double> alphas() const { return alphas_; }
  std::span<const double> alpha_log_sums() const { return alpha_log_sums_; }

  /// log(sum f^order) for an arbitrary order (not cached).
  double log_power_sum(double order) const;

  /// Number of leading ranks whose suffix sums are cached.
  std::size_t head_size() const { return head_; }
  /// log(sum over ranks >= rank of f^alpha) for alphas()[index], rank <= head_size().
  double alpha_suffix_log_sum(std::size_t index, std::size_t rank) const {
    return alpha_suffix_[index * (head_ + 1) + rank];
  }

  static constexpr std::size_t kHeadAtoms = 1024;

 private:
  const PosteriorTable* table_;
  AlphaGrid grid_;
  std::vector<double> betas_, beta_log_sums_;
  std::vector<double> alphas_, alpha_log_sums_;
  std::size_t head_ = 0;
  std::vector<double> alpha_suffix_;
};

/// Upper bound on the correct-classification probability of any policy with
/// `budget` queries: exp of the infimum over alpha < -1 of
/// (1/alpha)(H_{alpha/(alpha+1)}(L|e) - budget*log|L|), clamped to 1. The
/// infimum is searched over beta = alpha/(alpha+1) on the grid, then refined
/// by golden-section search around the best grid point.
double renyi_upper_bound(const RenyiProfile& profile, int budget);
double renyi_upper_bound(const PosteriorTable& table, int budget, const AlphaGrid& grid = {});

/// Number of leading ordered posteriors the lower bound may count.
/// Permutation-invariant posteriors admit |L|!(M-|L|+2) when M >= |L|-1 and
/// |L|!/(|L|-M)! otherwise; arbitrary posteriors admit M+1. Saturates at
/// UINT64_MAX.
std::uint64_t lower_bound_terms(int num_labels, int budget, bool perm_invariant);

struct RenyiLowerBound {
  double value = 0.0;
  std::uint64_t terms = 0;         // number of increments allowed
  std::vector<double> increments;  // positive increments actually produced
};

/// Iterative Renyi lower bound on the optimal correct-classification
/// probability. Each increment is a provable lower bound on the largest atom
/// of the residual distribution (what is left after earlier increments are
/// carved out of the atoms they bounded, renormalised). The recursion stops
/// early once no grid order yields a valid entropy estimate, an increment is
/// <= 0, or it would need an atom beyond the cached head.
RenyiLowerBound renyi_lower_bound(const RenyiProfile& profile, int budget, bool perm_invariant);
RenyiLowerBound renyi_lower_bound(const PosteriorTable& table, int budget, bool perm_invariant,
                                  const AlphaGrid& grid = {});

struct SeparablePrefix {
  std::uint64_t count = 1;  // largest separable prefix of the ordering
  std::vector<int> items;   // a witness subset, ascending
};

/// Largest G such that some `budget` items give the G most probable
/// configurations pairwise-distinct labels, where equal posteriors may be
/// taken in any order. Capped at |L|^budget, the table
/// size and the number of configurations with posterior above 1e-15.
SeparablePrefix separable_prefix(const PosteriorTable& table, int budget);

struct GainBounds {
  double lower = 1.0;
  double upper = 1.0;
  std::uint64_t separable = 1;
};

/// Gain bounds from the ordered normalised accuracies: the first `separable`
/// of them (lower) and the first |L|^budget of them (upper).
GainBounds ordered_gain_bounds(const PosteriorTable& table, int budget);

/// Per-budget summary of exact performance and every bound.
struct BoundReport {
  int budget = 0;
  double pc_exact = 0.0;
  double renyi_upper = 1.0;
  double renyi_lower = 0.0;
  double ordered_lower = 1.0;  // gain
  double ordered_upper = 1.0;  // gain
  double gain = 1.0;
  double gain_ceiling = 1.0;
  std::uint64_t lower_terms = 1;
  std::uint64_t separable = 1;
  bool perm_invariant = false;
};

/// Builds BoundReports for one posterior, sharing the grid cache.
class BoundEvaluator {
 public:
  BoundEvaluator(const PosteriorTable& table, const AlphaGrid& grid);

  bool perm_invariant() const { return perm_invariant_; }
  BoundReport report(int budget, double pc_exact) const;

 private:
  RenyiProfile profile_;
  bool perm_invariant_;
};

/// Names of the sandwich relations a report violates, with `slack` absolute
/// tolerance on each comparison. Empty when the report is consistent.
std::vector<std::string> sandwich_violations(const BoundReport& report, double map_prob, double slack = 1e-9);

}  // namespace alq
