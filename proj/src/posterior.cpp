#include "alq/posterior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "alq/error.hpp"
#include "alq/logmath.hpp"

namespace alq {

PartialLabeling::PartialLabeling(int n) : labels_(static_cast<std::size_t>(n), -1) {
  if (n < 0 || n > 32) throw ValidationError("partial labeling supports 0..32 items");
}

std::uint32_t PartialLabeling::mask() const {
  std::uint32_t m = 0;
  for (int i = 0; i < n(); ++i)
    if (labels_[i] >= 0) m |= 1u << i;
  return m;
}

std::vector<std::pair<int, int>> PartialLabeling::entries() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n(); ++i)
    if (labels_[i] >= 0) out.emplace_back(i, labels_[i]);
  return out;
}

void PartialLabeling::reveal(int item, int label) {
  if (item < 0 || item >= n()) throw ValidationError("revealed item out of range");
  if (label < 0) throw ValidationError("revealed label must be nonnegative");
  if (labels_[item] < 0) ++count_;
  labels_[item] = label;
}

PartialLabeling PartialLabeling::with(int item, int label) const {
  PartialLabeling copy = *this;
  copy.reveal(item, label);
  return copy;
}

bool PartialLabeling::consistent(std::uint64_t code, const LabelCodec& codec) const {
  for (int i = 0; i < n(); ++i)
    if (labels_[i] >= 0 && codec.label(code, i) != labels_[i]) return false;
  return true;
}

PosteriorTable::PosteriorTable(int n, int num_labels, std::vector<double> log_probs, std::vector<double> probs)
    : codec_(n, num_labels), log_probs_(std::move(log_probs)), probs_(std::move(probs)) {
  if (probs_.empty()) {
    probs_.resize(log_probs_.size());
    std::transform(log_probs_.begin(), log_probs_.end(), probs_.begin(), [](double lp) { return std::exp(lp); });
  }
  order_.resize(log_probs_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  std::stable_sort(order_.begin(), order_.end(),
                   [this](std::uint32_t a, std::uint32_t b) { return log_probs_[a] > log_probs_[b]; });
}

PosteriorTable PosteriorTable::from_log_weights(int n, int num_labels, std::vector<double> log_weights) {
  const LabelCodec codec(n, num_labels);
  if (log_weights.size() != codec.config_count()) throw ValidationError("weight vector has wrong length");
  if (codec.config_count() > (std::uint64_t{1} << 26)) throw ValidationError("enumeration cap exceeded");
  for (double w : log_weights)
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity())
      throw ValidationError("log-weights must be finite or -inf");
  const double log_z = log_sum_exp(log_weights);
  if (!std::isfinite(log_z)) throw ValidationError("posterior has zero total mass");
  for (double& w : log_weights) w -= log_z;
  return PosteriorTable(n, num_labels, std::move(log_weights));
}

PosteriorTable PosteriorTable::from_probabilities(int n, int num_labels, std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("probabilities must sum to 1");
  std::vector<double> logs(probs.size());
  std::transform(probs.begin(), probs.end(), logs.begin(),
                 [](double p) { return p > 0.0 ? std::log(p) : kNegInf; });
  const LabelCodec codec(n, num_labels);
  if (logs.size() != codec.config_count()) throw ValidationError("probability vector has wrong length");
  // Keep the given values verbatim; exp(log(p)) need not round-trip.
  return PosteriorTable(n, num_labels, std::move(logs), std::vector<double>(probs.begin(), probs.end()));
}

PosteriorTable compute_posterior(const SbmParams& params, const Observation& obs) {
  params.validate();
  if (obs.n() != params.n) throw ValidationError("observation size does not match model size");
  const LabelCodec codec(params.n, params.num_labels);
  const auto prior = params.prior();
  std::vector<double> log_prior(prior.size());
  std::transform(prior.begin(), prior.end(), log_prior.begin(),
                 [](double p) { return p > 0.0 ? std::log(p) : kNegInf; });

  const LikelihoodKernel likelihood(params, obs);
  std::vector<double> weights(codec.config_count());
  std::vector<int> labels(static_cast<std::size_t>(params.n), 0);
  for (std::uint64_t code = 0; code < weights.size(); ++code) {
    double lp = 0.0;
    for (int l : labels) lp += log_prior[l];
    weights[code] = lp == kNegInf ? kNegInf : lp + likelihood(labels);
    for (int i = 0; i < params.n; ++i) {
      if (++labels[i] < params.num_labels) break;
      labels[i] = 0;
    }
  }
  return PosteriorTable::from_log_weights(params.n, params.num_labels, std::move(weights));
}

double normalized_accuracy(const PosteriorTable& table, LabelConfig config) {
  if (config.code >= table.size()) throw ValidationError("label configuration out of range");
  return std::exp(table.log_prob(config.code) - table.log_prob(table.order()[0]));
}

namespace {

void check_revealed(const PosteriorTable& table, const PartialLabeling& revealed) {
  if (revealed.n() != table.n()) throw ValidationError("partial labeling size does not match table");
  for (auto [item, label] : revealed.entries())
    if (label >= table.num_labels()) throw ValidationError("revealed label out of range");
}

}  // namespace

double revealed_mass(const PosteriorTable& table, const PartialLabeling& revealed) {
  check_revealed(table, revealed);
  double mass = 0.0;
  for (std::uint64_t code = 0; code < table.size(); ++code)
    if (revealed.consistent(code, table.codec())) mass += table.prob(code);
  return mass;
}

std::vector<double> conditional_label_dist(const PosteriorTable& table, const PartialLabeling& revealed,
                                           int item) {
  check_revealed(table, revealed);
  if (item < 0 || item >= table.n()) throw ValidationError("item out of range");
  if (revealed.is_revealed(item)) throw ValidationError("item is already revealed");
  std::vector<double> dist(static_cast<std::size_t>(table.num_labels()), 0.0);
  for (std::uint64_t code = 0; code < table.size(); ++code)
    if (revealed.consistent(code, table.codec())) dist[table.codec().label(code, item)] += table.prob(code);
  const double mass = std::accumulate(dist.begin(), dist.end(), 0.0);
  if (!(mass > 0.0)) throw InvariantError("revealed labels have zero posterior mass");
  for (double& p : dist) p /= mass;
  return dist;
}

ConsistentMax max_joint_consistent(const PosteriorTable& table, const PartialLabeling& revealed) {
  check_revealed(table, revealed);
  ConsistentMax best{-1.0, {0}};
  for (std::uint64_t code = 0; code < table.size(); ++code) {
    if (!revealed.consistent(code, table.codec())) continue;
    if (table.prob(code) > best.value) best = {table.prob(code), {code}};
  }
  if (best.value < 0.0) throw ValidationError("revealed labels admit no configuration");
  return best;
}

bool is_permutation_invariant(const PosteriorTable& table, double tol) {
  const int num_labels = table.num_labels();
  if (num_labels <= 1) return true;

  std::vector<std::vector<int>> perms;
  std::vector<int> sigma(static_cast<std::size_t>(num_labels));
  std::iota(sigma.begin(), sigma.end(), 0);
  if (num_labels <= 4) {
    while (std::next_permutation(sigma.begin(), sigma.end())) perms.push_back(sigma);
  } else {
    std::vector<int> swap01 = sigma;
    std::swap(swap01[0], swap01[1]);
    perms.push_back(swap01);
    std::vector<int> cycle(static_cast<std::size_t>(num_labels));
    for (int l = 0; l < num_labels; ++l) cycle[l] = (l + 1) % num_labels;
    perms.push_back(cycle);
  }

  const auto& codec = table.codec();
  std::vector<int> labels(static_cast<std::size_t>(table.n()), 0);
  std::vector<int> mapped(labels.size());
  for (std::uint64_t code = 0; code < table.size(); ++code) {
    for (const auto& p : perms) {
      for (std::size_t i = 0; i < labels.size(); ++i) mapped[i] = p[labels[i]];
      const auto image = codec.pack(mapped);
      if (std::abs(table.prob(code) - table.prob(image)) > tol) return false;
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (++labels[i] < num_labels) break;
      labels[i] = 0;
    }
  }
  return true;
}

}  // namespace alq
