#include "alq/query_policy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "alq/error.hpp"

namespace alq {

double LossFunction::operator()(const LabelCodec& codec, std::uint64_t estimate, std::uint64_t truth) const {
  if (kind == LossKind::kBinary) return estimate == truth ? 0.0 : 1.0;
  double mismatches = 0.0;
  for (int i = 0; i < codec.n(); ++i)
    if (codec.label(estimate, i) != codec.label(truth, i)) mismatches += 1.0;
  return mismatches;
}

std::string to_string(LossKind kind) { return kind == LossKind::kBinary ? "binary" : "hamming"; }

LossKind parse_loss_kind(const std::string& name) {
  if (name == "binary") return LossKind::kBinary;
  if (name == "hamming") return LossKind::kHamming;
  throw ValidationError("unknown loss kind '" + name + "' (expected binary or hamming)");
}

namespace {

std::vector<std::vector<std::uint64_t>> binomial_table(int n) {
  std::vector<std::vector<std::uint64_t>> c(static_cast<std::size_t>(n) + 2,
                                            std::vector<std::uint64_t>(static_cast<std::size_t>(n) + 2, 0));
  for (int i = 0; i <= n + 1; ++i) {
    c[i][0] = 1;
    for (int k = 1; k <= i; ++k) c[i][k] = c[i - 1][k - 1] + (k <= i - 1 ? c[i - 1][k] : 0);
  }
  return c;
}

// Visits every n-bit mask with `bits` set bits in colex order (Gosper's hack).
template <class F>
void for_each_subset(int n, int bits, F&& visit) {
  if (bits == 0) {
    visit(std::uint32_t{0});
    return;
  }
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uint64_t x = (std::uint64_t{1} << bits) - 1;
  while (x < limit) {
    visit(static_cast<std::uint32_t>(x));
    const std::uint64_t c = x & (~x + 1);
    const std::uint64_t r = x + c;
    x = (((r ^ x) >> 2) / c) | r;
  }
}

// Calls visit(code, pattern, digits) for every configuration in ascending
// code order, where `pattern` packs the labels of the items in `mask` as
// radix-|L| digits in ascending item order.
template <class F>
void scan_patterns(const LabelCodec& codec, std::uint32_t mask, F&& visit) {
  const int n = codec.n();
  const auto base = static_cast<std::uint64_t>(codec.num_labels());
  std::vector<std::uint64_t> weight(static_cast<std::size_t>(n), 0);
  std::uint64_t w = 1;
  for (int i = 0; i < n; ++i)
    if ((mask >> i) & 1u) {
      weight[i] = w;
      w *= base;
    }
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  std::uint64_t pattern = 0;
  const std::uint64_t total = codec.config_count();
  for (std::uint64_t code = 0; code < total; ++code) {
    visit(code, pattern, std::span<const int>(digits));
    for (int i = 0; i < n; ++i) {
      if (static_cast<std::uint64_t>(++digits[i]) < base) {
        pattern += weight[i];
        break;
      }
      digits[i] = 0;
      pattern -= weight[i] * (base - 1);
    }
  }
}

std::uint64_t ipow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace

std::uint64_t plan_state_count(int n, int num_labels, int budget) {
  const auto binom = binomial_table(n);
  std::uint64_t total = 0;
  for (int m = 0; m <= budget && m <= n; ++m) {
    const auto per = static_cast<long double>(binom[n][m]) * std::pow(static_cast<long double>(num_labels), m);
    if (per > 1e18L) return UINT64_MAX;
    total += static_cast<std::uint64_t>(per);
  }
  return total;
}

std::uint64_t QueryPlan::state_count() const {
  std::uint64_t total = 0;
  for (const auto& level : levels_) total += level.size();
  return total;
}

std::uint64_t QueryPlan::subset_rank(std::uint32_t mask) const {
  std::uint64_t rank = 0;
  int t = 0;
  for (int i = 0; i < n_; ++i)
    if ((mask >> i) & 1u) rank += binom_[i][++t];
  return rank;
}

std::uint64_t QueryPlan::pattern_code(const PartialLabeling& revealed) const {
  std::uint64_t code = 0;
  int t = 0;
  for (auto [item, label] : revealed.entries()) code += static_cast<std::uint64_t>(label) * label_powers_[t++];
  return code;
}

void QueryPlan::check_state(const PartialLabeling& revealed) const {
  if (revealed.n() != n_) throw ValidationError("partial labeling size does not match plan");
  if (revealed.size() > budget_) throw ValidationError("state has more revealed items than the query budget");
  for (auto [item, label] : revealed.entries())
    if (label >= num_labels_) throw ValidationError("revealed label out of range");
}

double QueryPlan::value(const PartialLabeling& revealed) const {
  check_state(revealed);
  const int m = revealed.size();
  return levels_[m][subset_rank(revealed.mask()) * label_powers_[m] + pattern_code(revealed)];
}

int QueryPlan::next_query(const PartialLabeling& revealed) const {
  check_state(revealed);
  const int m = revealed.size();
  if (m >= budget_) throw ValidationError("query budget already exhausted at this state");
  return choices_[m][subset_rank(revealed.mask()) * label_powers_[m] + pattern_code(revealed)];
}

QueryPlan build_plan(const PosteriorTable& table, int budget, LossKind loss, std::optional<Objective> objective,
                     std::uint64_t state_cap) {
  const int n = table.n();
  const int num_labels = table.num_labels();
  if (budget < 0 || budget > n) throw ValidationError("query budget must lie in [0, n]");
  const Objective obj = objective.value_or(loss == LossKind::kBinary ? Objective::kCorrectMass : Objective::kRisk);
  if (obj == Objective::kCorrectMass && loss != LossKind::kBinary)
    throw ValidationError("correct-mass objective requires binary loss");
  const std::uint64_t states = plan_state_count(n, num_labels, budget);
  if (states > state_cap)
    throw ValidationError("plan needs " + std::to_string(states) + " states, above the cap of " +
                          std::to_string(state_cap));

  QueryPlan plan;
  plan.n_ = n;
  plan.num_labels_ = num_labels;
  plan.budget_ = budget;
  plan.loss_ = loss;
  plan.objective_ = obj;
  plan.binom_ = binomial_table(n);
  plan.label_powers_.resize(static_cast<std::size_t>(n) + 2);
  for (int m = 0; m <= n + 1; ++m) plan.label_powers_[m] = ipow(static_cast<std::uint64_t>(num_labels), m);
  plan.levels_.resize(static_cast<std::size_t>(budget) + 1);
  plan.choices_.resize(static_cast<std::size_t>(budget));
  for (int m = 0; m <= budget; ++m) plan.levels_[m].assign(plan.binom_[n][m] * plan.label_powers_[m], 0.0);

  const auto& codec = table.codec();
  const auto probs = table.probs();
  const std::uint64_t patterns = plan.label_powers_[budget];

  // Leaves: one ascending-code pass over the table per budget-sized subset.
  std::uint64_t rank = 0;
  std::vector<double> mass(patterns), best(patterns);
  std::vector<double> marginal;
  for_each_subset(n, budget, [&](std::uint32_t mask) {
    std::fill(mass.begin(), mass.end(), 0.0);
    std::fill(best.begin(), best.end(), 0.0);
    const bool hamming = obj == Objective::kRisk && loss == LossKind::kHamming;
    if (hamming) marginal.assign(patterns * static_cast<std::uint64_t>(n * num_labels), 0.0);
    scan_patterns(codec, mask, [&](std::uint64_t code, std::uint64_t pattern, std::span<const int> digits) {
      const double p = probs[code];
      mass[pattern] += p;
      if (p > best[pattern]) best[pattern] = p;
      if (hamming) {
        double* row = &marginal[pattern * static_cast<std::uint64_t>(n * num_labels)];
        for (int i = 0; i < n; ++i)
          if (!((mask >> i) & 1u)) row[i * num_labels + digits[i]] += p;
      }
    });
    double* out = &plan.levels_[budget][rank * patterns];
    for (std::uint64_t pat = 0; pat < patterns; ++pat) {
      if (obj == Objective::kCorrectMass) {
        out[pat] = best[pat];
      } else if (loss == LossKind::kBinary) {
        out[pat] = mass[pat] - best[pat];
      } else {
        const double* row = &marginal[pat * static_cast<std::uint64_t>(n * num_labels)];
        double risk = 0.0;
        for (int i = 0; i < n; ++i) {
          if ((mask >> i) & 1u) continue;
          double top = row[i * num_labels];
          for (int l = 1; l < num_labels; ++l) top = std::max(top, row[i * num_labels + l]);
          risk += mass[pat] - top;
        }
        out[pat] = risk;
      }
    }
    ++rank;
  });

  // Interior levels: best item by summed child values (expectation in joint
  // form), smallest item index on ties.
  struct Child {
    int item;
    std::uint64_t base;   // offset of the child subset's block
    std::uint64_t split;  // |L|^(position of item among the subset)
  };
  const bool maximize = obj == Objective::kCorrectMass;
  for (int m = budget - 1; m >= 0; --m) {
    const auto& child_level = plan.levels_[m + 1];
    auto& level = plan.levels_[m];
    auto& choice = plan.choices_[m];
    choice.assign(level.size(), -1);
    const std::uint64_t width = plan.label_powers_[m];
    const std::uint64_t child_width = plan.label_powers_[m + 1];
    std::vector<Child> children;
    rank = 0;
    for_each_subset(n, m, [&](std::uint32_t mask) {
      children.clear();
      for (int j = 0; j < n; ++j) {
        if ((mask >> j) & 1u) continue;
        const int position = std::popcount(mask & ((1u << j) - 1u));
        children.push_back({j, plan.subset_rank(mask | (1u << j)) * child_width, plan.label_powers_[position]});
      }
      for (std::uint64_t code = 0; code < width; ++code) {
        double chosen = 0.0;
        int chosen_item = -1;
        for (const auto& c : children) {
          const std::uint64_t low = code % c.split;
          const std::uint64_t high = code / c.split;
          const std::uint64_t idx = c.base + low + high * c.split * static_cast<std::uint64_t>(num_labels);
          double acc = 0.0;
          for (int l = 0; l < num_labels; ++l) acc += child_level[idx + static_cast<std::uint64_t>(l) * c.split];
          if (chosen_item < 0 || (maximize ? acc > chosen : acc < chosen)) {
            chosen = acc;
            chosen_item = c.item;
          }
        }
        level[rank * width + code] = chosen;
        choice[rank * width + code] = static_cast<std::int8_t>(chosen_item);
      }
      ++rank;
    });
  }
  return plan;
}

std::vector<DecisionNode> realized_tree(const QueryPlan& plan) {
  std::vector<DecisionNode> nodes;
  std::function<std::size_t(const PartialLabeling&)> expand = [&](const PartialLabeling& revealed) {
    const std::size_t id = nodes.size();
    nodes.push_back({revealed, -1, plan.value(revealed), {}});
    if (revealed.size() < plan.budget()) {
      const int item = plan.next_query(revealed);
      nodes[id].next_item = item;
      for (int l = 0; l < plan.num_labels(); ++l) {
        const std::size_t child = expand(revealed.with(item, l));
        nodes[id].children.push_back(child);
      }
    }
    return id;
  };
  expand(PartialLabeling(plan.n()));
  return nodes;
}

double pc_ssp(const QueryPlan& plan, const PosteriorTable& table) {
  if (plan.loss() != LossKind::kBinary) throw ValidationError("pc_ssp needs a binary-loss plan");
  if (plan.n() != table.n() || plan.num_labels() != table.num_labels())
    throw ValidationError("plan and posterior table disagree on dimensions");
  double total = 0.0;
  std::function<void(const PartialLabeling&)> walk = [&](const PartialLabeling& revealed) {
    if (revealed.size() == plan.budget()) {
      total += max_joint_consistent(table, revealed).value;
      return;
    }
    const int item = plan.next_query(revealed);
    for (int l = 0; l < plan.num_labels(); ++l) walk(revealed.with(item, l));
  };
  walk(PartialLabeling(plan.n()));
  return total;
}

std::vector<double> pc_ssp_curve(const PosteriorTable& table, int m_max, std::uint64_t state_cap) {
  const int n = table.n();
  const int num_labels = table.num_labels();
  if (m_max < 0 || m_max > n) throw ValidationError("m_max must lie in [0, n]");
  std::vector<double> curve(static_cast<std::size_t>(m_max) + 1);

  const long double dense_states = std::pow(static_cast<long double>(num_labels + 1), n);
  if (dense_states > static_cast<long double>(state_cap)) {
    for (int m = 0; m <= m_max; ++m) curve[m] = build_plan(table, m, LossKind::kBinary).root_value();
    return curve;
  }

  // Digit i of a dense state is 0 when item i is unqueried, else 1 + label.
  const int base = num_labels + 1;
  std::vector<std::uint64_t> stride(static_cast<std::size_t>(n) + 1);
  stride[0] = 1;
  for (int i = 1; i <= n; ++i) stride[i] = stride[i - 1] * static_cast<std::uint64_t>(base);
  const std::uint64_t total = stride[n];
  std::vector<double> value(total);
  std::vector<int> digits(static_cast<std::size_t>(n));

  // Descending sweep: every child (one more queried item) has a larger index.
  auto sweep = [&](auto&& visit) {
    std::fill(digits.begin(), digits.end(), base - 1);
    int level = n;
    for (std::uint64_t s = total;;) {
      --s;
      visit(s, level);
      if (s == 0) break;
      int i = 0;
      while (digits[i] == 0) {
        digits[i] = base - 1;
        ++level;
        ++i;
      }
      if (--digits[i] == 0) --level;
    }
  };

  // Max-marginals: best configuration mass consistent with each state.
  const auto probs = table.probs();
  const auto& powers = table.codec();
  sweep([&](std::uint64_t s, int level) {
    if (level == n) {
      std::uint64_t code = 0;
      for (int i = 0; i < n; ++i) code += static_cast<std::uint64_t>(digits[i] - 1) * powers.power(i);
      value[s] = probs[code];
      return;
    }
    int j = 0;
    while (digits[j] != 0) ++j;
    double top = value[s + stride[j]];
    for (int l = 1; l < num_labels; ++l) top = std::max(top, value[s + static_cast<std::uint64_t>(l + 1) * stride[j]]);
    value[s] = top;
  });
  curve[0] = value[0];

  // Budget M overwrites only depths < M; depth M still holds max-marginals.
  for (int budget = 1; budget <= m_max; ++budget) {
    sweep([&](std::uint64_t s, int level) {
      if (level >= budget) return;
      double chosen = 0.0;
      bool any = false;
      for (int j = 0; j < n; ++j) {
        if (digits[j] != 0) continue;
        double acc = 0.0;
        for (int l = 0; l < num_labels; ++l) acc += value[s + static_cast<std::uint64_t>(l + 1) * stride[j]];
        if (!any || acc > chosen) {
          chosen = acc;
          any = true;
        }
      }
      value[s] = chosen;
    });
    curve[budget] = value[0];
  }
  return curve;
}

double pc_batch(const PosteriorTable& table, std::span<const int> items) {
  std::uint32_t mask = 0;
  for (int item : items) {
    if (item < 0 || item >= table.n()) throw ValidationError("batch item out of range");
    if ((mask >> item) & 1u) throw ValidationError("batch items must be distinct");
    mask |= 1u << item;
  }
  const std::uint64_t patterns = ipow(static_cast<std::uint64_t>(table.num_labels()), static_cast<int>(items.size()));
  std::vector<double> best(patterns, 0.0);
  const auto probs = table.probs();
  scan_patterns(table.codec(), mask, [&](std::uint64_t code, std::uint64_t pattern, std::span<const int>) {
    if (probs[code] > best[pattern]) best[pattern] = probs[code];
  });
  double total = 0.0;
  for (double b : best) total += b;
  return total;
}

double al_gain(const PosteriorTable& table, double pc_ssp_value) {
  const double map = table.map_prob();
  if (!(pc_ssp_value >= map * (1.0 - 1e-12) && pc_ssp_value <= 1.0 + 1e-12))
    throw ValidationError("correct-classification probability must lie in [f_map, 1]");
  return pc_ssp_value / map;
}

}  // namespace alq
