#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "alq/rng.hpp"

namespace alq {

/// Largest n*log2(num_labels) for which the full configuration table is built.
inline constexpr double kEnumerationBitCap = 26.0;

/// Known generative model: i.i.d. labels from `label_prior`, then each pair
/// (i, j) is linked with probability q_in if the labels match and q_out if
/// they differ.
struct SbmParams {
  int n = 0;
  int num_labels = 2;
  double q_in = 0.0;
  double q_out = 0.0;
  std::vector<double> label_prior;  // empty means uniform

  /// Throws ValidationError when any invariant is broken.
  void validate() const;

  /// Prior with the uniform default filled in.
  std::vector<double> prior() const;

  /// |L|^n; call validate() first.
  std::uint64_t config_count() const;
};

/// One labeling of all items, packed as a radix-|L| integer: digit i is the
/// label of item i.
struct LabelConfig {
  std::uint64_t code = 0;
  friend bool operator==(LabelConfig, LabelConfig) = default;
};

/// Digit packing helpers for a fixed (n, |L|).
class LabelCodec {
 public:
  LabelCodec(int n, int num_labels);

  int n() const { return n_; }
  int num_labels() const { return num_labels_; }
  std::uint64_t config_count() const { return powers_[n_]; }
  std::uint64_t power(int i) const { return powers_[i]; }

  int label(std::uint64_t code, int item) const {
    return static_cast<int>((code / powers_[item]) % static_cast<std::uint64_t>(num_labels_));
  }
  std::vector<int> unpack(std::uint64_t code) const;
  std::uint64_t pack(std::span<const int> labels) const;
  /// Labels as a string of digits, item 0 first ("01" = item0:0, item1:1).
  std::string to_string(std::uint64_t code) const;

 private:
  int n_;
  int num_labels_;
  std::vector<std::uint64_t> powers_;
};

/// Undirected simple graph on n items. Only pairs i<j are meaningful; the
/// neighbour masks are kept symmetric.
class Observation {
 public:
  explicit Observation(int n = 0);

  int n() const { return n_; }
  bool has_edge(int i, int j) const;
  void set_edge(int i, int j, bool present = true);
  std::uint32_t neighbors(int i) const { return adjacency_[i]; }
  int edge_count() const;
  /// Edges as (i, j) with i<j in lexicographic order.
  std::vector<std::pair<int, int>> edges() const;

  friend bool operator==(const Observation&, const Observation&) = default;

 private:
  int n_;
  std::vector<std::uint32_t> adjacency_;
};

/// Discretisation of the entropy-order infima used by the Renyi bounds.
/// The upper bound searches beta = alpha/(alpha+1) in (1, beta_max]; the
/// lower bound searches alpha in [alpha_min, alpha_max]. Both grids are
/// log-spaced.
struct AlphaGrid {
  int beta_points = 200;
  double beta_max = 1e3;
  double beta_min_offset = 1e-4;  // smallest grid beta is 1 + offset
  double refine_rel_tol = 1e-6;
  int alpha_points = 200;
  double alpha_min = 1.0 + 1e-6;
  double alpha_max = 1e4;

  void validate() const;
};

/// Monte Carlo scenario: SBM rates scale as a*ln(N)/N and b*ln(N)/N.
struct ScenarioConfig {
  std::string id = "scenario";
  double a = 2.0;
  double b = 0.25;
  int n = 15;
  int num_labels = 2;
  int m_max = 8;
  int realizations = 50;
  std::uint64_t seed = 1;
  AlphaGrid alpha_grid;

  double q_in() const;
  double q_out() const;
  /// Detectability diagnostic (sqrt(a) - sqrt(b)) / sqrt(2); informational only.
  double eta() const;
  /// Uniform-prior SBM parameters implied by the rates.
  SbmParams params() const;
  void validate() const;
};

/// The three two-community scenarios used for the N=15 reproduction runs.
std::vector<ScenarioConfig> default_scenarios();

LabelConfig sample_labels(const SbmParams& params, RandomStream& rng);
Observation sample_observation(const SbmParams& params, LabelConfig labels, RandomStream& rng);

/// Bernoulli log-likelihood of `obs` given `labels`, summed over pairs i<j.
double log_likelihood(const SbmParams& params, LabelConfig labels, const Observation& obs);

/// Pair-count likelihood evaluator reused across every configuration of one
/// observation. Counts same-label pairs and same-label edges with popcounts.
class LikelihoodKernel {
 public:
  LikelihoodKernel(const SbmParams& params, const Observation& obs);

  /// `labels[i]` is item i's label.
  double operator()(std::span<const int> labels) const;

 private:
  int n_;
  int num_labels_;
  std::vector<std::uint32_t> adjacency_;
  std::int64_t total_pairs_;
  std::int64_t total_edges_;
  double log_q_in_, log_not_q_in_, log_q_out_, log_not_q_out_;
};

}  // namespace alq
