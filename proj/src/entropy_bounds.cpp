#include "alq/entropy_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "alq/error.hpp"
#include "alq/golden.hpp"
#include "alq/logmath.hpp"

namespace alq {

namespace {

void check_distribution(std::span<const double> dist) {
  double total = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0)) throw ValidationError("distribution entries must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("distribution must sum to 1");
}

void check_order(double alpha) {
  if (!std::isfinite(alpha)) throw ValidationError("Renyi order must be finite");
  if (alpha == 1.0) throw ValidationError("Renyi order 1 is the Shannon limit; use shannon_entropy");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double renyi_entropy(std::span<const double> dist, double alpha) {
  check_distribution(dist);
  check_order(alpha);
  std::vector<double> logs;
  logs.reserve(dist.size());
  for (double p : dist) {
    if (p > 0.0) {
      logs.push_back(std::log(p));
    } else if (alpha < 0.0) {
      return kInf;
    }
  }
  return log_sum_exp_scaled(logs, alpha) / (1.0 - alpha);
}

double shannon_entropy(std::span<const double> dist) {
  check_distribution(dist);
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double conditional_event_renyi(const PosteriorTable& table, double alpha) {
  check_order(alpha);
  if (alpha < 0.0)
    for (double p : table.probs())
      if (p == 0.0) return kInf;
  return log_sum_exp_scaled(table.log_probs(), alpha) / (1.0 - alpha);
}

double arimoto_conditional_entropy(const std::vector<std::vector<double>>& joint, double alpha) {
  check_order(alpha);
  if (alpha <= 0.0) throw ValidationError("Arimoto conditional entropy needs a positive order");
  double total = 0.0;
  for (const auto& row : joint)
    for (double p : row) {
      if (!(p >= 0.0)) throw ValidationError("joint pmf entries must be nonnegative");
      total += p;
    }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("joint pmf must sum to 1");

  std::vector<double> terms;
  for (const auto& row : joint) {
    const double p_y = std::accumulate(row.begin(), row.end(), 0.0);
    if (p_y <= 0.0) continue;
    std::vector<double> conditional(row.size());
    std::transform(row.begin(), row.end(), conditional.begin(), [p_y](double p) { return p / p_y; });
    // Renormalise away rounding so the conditional passes validation.
    const double s = std::accumulate(conditional.begin(), conditional.end(), 0.0);
    for (double& p : conditional) p /= s;
    const double h_y = renyi_entropy(conditional, alpha);
    terms.push_back(std::log(p_y) + (1.0 - alpha) / alpha * h_y);
  }
  return alpha / (1.0 - alpha) * log_sum_exp(terms);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) throw ValidationError("invalid log-spaced grid");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

RenyiProfile::RenyiProfile(const PosteriorTable& table, const AlphaGrid& grid) : table_(&table), grid_(grid) {
  grid_.validate();
  for (double offset : log_spaced(grid_.beta_min_offset, grid_.beta_max - 1.0, grid_.beta_points)) {
    betas_.push_back(1.0 + offset);
    beta_log_sums_.push_back(log_power_sum(betas_.back()));
  }
  alphas_ = log_spaced(grid_.alpha_min, grid_.alpha_max, grid_.alpha_points);
  for (double a : alphas_) alpha_log_sums_.push_back(log_power_sum(a));

  // Suffix sums over ranks >= r for r <= head: the tail beyond the head is
  // summed once, then the head atoms are added back one rank at a time.
  head_ = std::min<std::size_t>(table.size(), kHeadAtoms);
  std::vector<double> tail(table.log_probs().begin(), table.log_probs().end());
  const auto order = table.order();
  for (std::size_t r = 0; r < head_; ++r) tail[order[r]] = kNegInf;
  alpha_suffix_.assign(alphas_.size() * (head_ + 1), kNegInf);
  for (std::size_t g = 0; g < alphas_.size(); ++g) {
    double acc = log_sum_exp_scaled(tail, alphas_[g]);
    alpha_suffix_[g * (head_ + 1) + head_] = acc;
    for (std::size_t r = head_; r-- > 0;) {
      const double term = alphas_[g] * table.log_prob(order[r]);
      const double hi = std::max(acc, term);
      if (hi != kNegInf) acc = hi + std::log(std::exp(acc - hi) + std::exp(term - hi));
      alpha_suffix_[g * (head_ + 1) + r] = acc;
    }
  }
}

double RenyiProfile::log_power_sum(double order) const {
  return log_sum_exp_scaled(table_->log_probs(), order);
}

double renyi_upper_bound(const RenyiProfile& profile, int budget) {
  if (budget < 0) throw ValidationError("query budget must be nonnegative");
  const double budget_term = budget * std::log(static_cast<double>(profile.table().num_labels()));
  // With alpha = beta/(1-beta) the objective (1/alpha)(H_beta - M log|L|)
  // becomes log_sum(beta)/beta + (beta-1)/beta * M log|L|.
  auto objective = [&](double beta, double log_sum) { return log_sum / beta + (beta - 1.0) / beta * budget_term; };

  const auto betas = profile.betas();
  const auto sums = profile.beta_log_sums();
  std::size_t best_i = 0;
  double best = objective(betas[0], sums[0]);
  for (std::size_t i = 1; i < betas.size(); ++i) {
    const double v = objective(betas[i], sums[i]);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }

  // Refine in log(beta - 1) between the grid neighbours of the best point.
  const double lo = std::log(betas[best_i == 0 ? 0 : best_i - 1] - 1.0);
  const double hi = std::log(betas[std::min(best_i + 1, betas.size() - 1)] - 1.0);
  if (hi > lo) {
    auto f = [&](double t) {
      const double beta = 1.0 + std::exp(t);
      return objective(beta, profile.log_power_sum(beta));
    };
    const auto refined = golden_section_minimize(f, lo, hi, profile.grid().refine_rel_tol);
    best = std::min(best, refined.value);
  }
  // The alpha -> -1 end (beta -> inf) has the closed-form limit
  // log f_max + M log|L|, which the finite grid only approaches.
  best = std::min(best, std::log(profile.table().map_prob()) + budget_term);
  return std::exp(std::min(0.0, best));
}

double renyi_upper_bound(const PosteriorTable& table, int budget, const AlphaGrid& grid) {
  return renyi_upper_bound(RenyiProfile(table, grid), budget);
}

std::uint64_t lower_bound_terms(int num_labels, int budget, bool perm_invariant) {
  if (budget < 0 || num_labels < 1) throw ValidationError("invalid arguments for the term count");
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (!perm_invariant) return static_cast<std::uint64_t>(budget) + 1;
  auto mul = [](std::uint64_t a, std::uint64_t b) { return (b != 0 && a > kMax / b) ? kMax : a * b; };
  if (budget >= num_labels - 1) {
    std::uint64_t factorial = 1;
    for (int k = 2; k <= num_labels; ++k) factorial = mul(factorial, static_cast<std::uint64_t>(k));
    return mul(factorial, static_cast<std::uint64_t>(budget - num_labels + 2));
  }
  // |L|! / (|L|-M)! = |L| (|L|-1) ... (|L|-M+1)
  std::uint64_t falling = 1;
  for (int k = num_labels; k > num_labels - budget; --k) falling = mul(falling, static_cast<std::uint64_t>(k));
  return falling;
}

RenyiLowerBound renyi_lower_bound(const RenyiProfile& profile, int budget, bool perm_invariant) {
  const auto& table = profile.table();
  RenyiLowerBound out;
  out.terms = std::min<std::uint64_t>(lower_bound_terms(table.num_labels(), budget, perm_invariant), table.size());

  const auto alphas = profile.alphas();
  const std::size_t head = profile.head_size();

  // Residual masses theta: each increment is carved out of the currently
  // largest residual atom. Atoms below rank `fresh` have been carved; the
  // rest still hold their posterior, and their power sums come from the
  // cached suffix sums.
  std::vector<double> theta;
  std::size_t fresh = 0;
  double claimed = 0.0;
  std::vector<double> scaled;
  for (std::uint64_t m = 0; m < out.terms; ++m) {
    const double remaining = 1.0 - claimed;
    if (!(remaining > 0.0)) break;
    const double log_remaining = std::log(remaining);

    double best_ratio = kInf;
    for (std::size_t g = 0; g < alphas.size(); ++g) {
      const double alpha = alphas[g];
      scaled.clear();
      for (double t : theta)
        if (t > 0.0) scaled.push_back(alpha * std::log(t));
      scaled.push_back(profile.alpha_suffix_log_sum(g, fresh));
      const double log_sum = log_sum_exp(scaled);

      const double entropy = (log_sum - alpha * log_remaining) / (1.0 - alpha);
      const double exp_entropy = std::exp(entropy);
      // No integer k >= 1 in the bracket, or the residual power sum underflowed.
      if (!(exp_entropy >= 1.0 - 1e-9) || !std::isfinite(exp_entropy)) continue;
      double k = std::floor(exp_entropy);
      const double nearest = std::nearbyint(exp_entropy);
      if (std::abs(exp_entropy - nearest) <= 1e-9 * std::max(1.0, nearest)) k = nearest;
      k = std::max(k, 1.0);

      // Both terms are factored so that nothing cancels as alpha -> 1 or
      // alpha -> inf: k^(1/a) * (H - k^(1/a) + (k-1)((k+1)^(1/a) - k^(1/a)))
      // over k(k+1)^(1/a) - (k+1)k^(1/a).
      const double log_k = std::log(k);
      const double root = log_k / alpha;
      const double step = std::log1p(1.0 / k);
      const double log_h = log_sum / alpha - log_remaining;
      const double numerator =
          std::exp(root) * (std::expm1(log_h - root) + (k - 1.0) * std::expm1(step / alpha));
      const double denominator = k * (k + 1.0) * std::exp(root - log_k) * std::expm1((1.0 / alpha - 1.0) * step);
      if (!(denominator < 0.0)) throw InvariantError("lower-bound denominator must be negative for alpha > 1");
      best_ratio = std::min(best_ratio, numerator / denominator);
    }
    if (best_ratio == kInf) break;

    // Largest residual atom, smallest rank on ties.
    std::size_t target = theta.size();
    double target_mass = fresh < table.size() ? table.prob_at_rank(fresh) : 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      if (theta[i] >= target_mass) {
        target = i;
        target_mass = theta[i];
        break;
      }
    }
    for (std::size_t i = target + 1; i < theta.size(); ++i)
      if (theta[i] > target_mass) {
        target = i;
        target_mass = theta[i];
      }
    if (target == theta.size()) {
      if (fresh >= head) break;  // the cached head is exhausted; stopping early only loosens the bound
      theta.push_back(target_mass);
      ++fresh;
    }

    const double increment = std::min((1.0 - best_ratio) * remaining, theta[target]);
    if (!(increment > 0.0)) break;
    theta[target] -= increment;
    out.increments.push_back(increment);
    claimed += increment;
  }
  out.value = 0.0;
  for (double b : out.increments) out.value += b;
  return out;
}

RenyiLowerBound renyi_lower_bound(const PosteriorTable& table, int budget, bool perm_invariant,
                                  const AlphaGrid& grid) {
  return renyi_lower_bound(RenyiProfile(table, grid), budget, perm_invariant);
}

SeparablePrefix separable_prefix(const PosteriorTable& table, int budget) {
  const int n = table.n();
  if (budget < 0 || budget > n) throw ValidationError("query budget must lie in [0, n]");
  const auto& codec = table.codec();
  const auto order = table.order();

  std::uint64_t patterns = 1;
  for (int m = 0; m < budget; ++m) patterns *= static_cast<std::uint64_t>(table.num_labels());
  std::uint64_t significant = 0;
  for (double p : table.probs())
    if (p > 1e-15) ++significant;
  const std::uint64_t cap = std::max<std::uint64_t>(1, std::min({patterns, table.size(), significant}));

  SeparablePrefix best;
  best.count = 1;
  if (budget == 0) return best;

  // Equal posteriors may be ordered freely, so configurations are scanned in
  // groups of equal log-probability. A group that collides contributes one
  // configuration per new pattern and ends the prefix.
  std::vector<std::uint32_t> stamp(patterns, 0), group_stamp(patterns, 0);
  std::uint32_t current = 0, group_id = 0;
  std::vector<int> members;
  std::vector<std::uint64_t> keys;
  bool first = true;
  const std::uint64_t limit = std::uint64_t{1} << n;
  auto key_of = [&](std::uint64_t code) {
    std::uint64_t key = 0;
    for (std::size_t t = members.size(); t-- > 0;)
      key = key * static_cast<std::uint64_t>(table.num_labels()) +
            static_cast<std::uint64_t>(codec.label(code, members[t]));
    return key;
  };
  for (std::uint64_t x = (std::uint64_t{1} << budget) - 1; x < limit;) {
    members.clear();
    for (int i = 0; i < n; ++i)
      if ((x >> i) & 1u) members.push_back(i);
    ++current;
    std::uint64_t distinct = 0;
    std::uint64_t begin = 0;
    while (distinct < cap && begin < table.size()) {
      std::uint64_t end = begin + 1;
      while (end < table.size() && table.log_prob(order[end]) == table.log_prob(order[begin])) ++end;
      ++group_id;
      keys.clear();
      bool collided = false;
      std::uint64_t fresh = 0;
      for (std::uint64_t r = begin; r < end; ++r) {
        const std::uint64_t key = key_of(order[r]);
        if (stamp[key] == current || group_stamp[key] == group_id) {
          collided = true;
          continue;
        }
        group_stamp[key] = group_id;
        keys.push_back(key);
        ++fresh;
      }
      for (std::uint64_t key : keys) stamp[key] = current;
      distinct = std::min(cap, distinct + fresh);
      if (collided) break;
      begin = end;
    }
    if (first || distinct > best.count) {
      best.count = distinct;
      best.items = members;
      first = false;
    }
    if (best.count >= cap) break;
    const std::uint64_t c = x & (~x + 1);
    const std::uint64_t r = x + c;
    x = (((r ^ x) >> 2) / c) | r;
  }
  return best;
}

GainBounds ordered_gain_bounds(const PosteriorTable& table, int budget) {
  if (budget < 0 || budget > table.n()) throw ValidationError("query budget must lie in [0, n]");
  GainBounds out;
  out.separable = separable_prefix(table, budget).count;
  std::uint64_t top = 1;
  for (int m = 0; m < budget && top < table.size(); ++m) top *= static_cast<std::uint64_t>(table.num_labels());
  top = std::min<std::uint64_t>(top, table.size());
  const auto order = table.order();
  const double log_map = table.log_prob(order[0]);
  double lower = 0.0, upper = 0.0;
  for (std::uint64_t i = 0; i < top; ++i) {
    const double phi = std::exp(table.log_prob(order[i]) - log_map);
    upper += phi;
    if (i < out.separable) lower += phi;
  }
  out.lower = lower;
  out.upper = upper;
  return out;
}

BoundEvaluator::BoundEvaluator(const PosteriorTable& table, const AlphaGrid& grid)
    : profile_(table, grid), perm_invariant_(is_permutation_invariant(table)) {}

BoundReport BoundEvaluator::report(int budget, double pc_exact) const {
  const auto& table = profile_.table();
  BoundReport r;
  r.budget = budget;
  r.pc_exact = pc_exact;
  r.renyi_upper = renyi_upper_bound(profile_, budget);
  const auto lower = renyi_lower_bound(profile_, budget, perm_invariant_);
  r.renyi_lower = lower.value;
  r.lower_terms = lower.terms;
  const auto gains = ordered_gain_bounds(table, budget);
  r.ordered_lower = gains.lower;
  r.ordered_upper = gains.upper;
  r.separable = gains.separable;
  r.gain = pc_exact / table.map_prob();
  r.gain_ceiling = 1.0 / table.map_prob();
  r.perm_invariant = perm_invariant_;
  return r;
}

std::vector<std::string> sandwich_violations(const BoundReport& r, double map_prob, double slack) {
  std::vector<std::string> out;
  if (r.renyi_lower > r.pc_exact + slack) out.push_back("renyi_lower <= pc_exact");
  if (r.pc_exact > r.renyi_upper + slack) out.push_back("pc_exact <= renyi_upper");
  if (r.pc_exact > 1.0 + slack) out.push_back("pc_exact <= 1");
  if (r.ordered_lower > r.gain + slack) out.push_back("ordered_lower <= gain");
  if (r.gain > r.ordered_upper + slack) out.push_back("gain <= ordered_upper");
  if (r.ordered_lower * map_prob > r.pc_exact + slack) out.push_back("ordered_lower*f_map <= pc_exact");
  if (r.pc_exact > r.ordered_upper * map_prob + slack) out.push_back("pc_exact <= ordered_upper*f_map");
  return out;
}

}  // namespace alq
