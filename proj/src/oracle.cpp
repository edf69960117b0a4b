#include "alq/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "alq/entropy_bounds.hpp"
#include "alq/error.hpp"

namespace alq::oracle {

std::vector<double> brute_posterior(const SbmParams& params, const Observation& obs) {
  params.validate();
  if (params.n > 4) throw ValidationError("brute_posterior supports n <= 4");
  if (obs.n() != params.n) throw ValidationError("observation size does not match model size");
  const LabelCodec codec(params.n, params.num_labels);
  const auto prior = params.prior();
  std::vector<long double> weights(codec.config_count());
  long double total = 0.0L;
  for (std::uint64_t code = 0; code < weights.size(); ++code) {
    const auto labels = codec.unpack(code);
    long double w = 1.0L;
    for (int l : labels) w *= prior[l];
    for (int i = 0; i < params.n; ++i)
      for (int j = i + 1; j < params.n; ++j) {
        const long double delta = labels[i] == labels[j] ? params.q_in : params.q_out;
        w *= obs.has_edge(i, j) ? delta : 1.0L - delta;
      }
    weights[code] = w;
    total += w;
  }
  std::vector<double> out(weights.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = static_cast<double>(weights[c] / total);
  return out;
}

double terminal_value(const PosteriorTable& table, const PartialLabeling& revealed, LossKind loss,
                      Objective objective) {
  const auto& codec = table.codec();
  double mass = 0.0;
  double best = 0.0;
  for (std::uint64_t code = 0; code < table.size(); ++code) {
    if (!revealed.consistent(code, codec)) continue;
    const double p = table.prob(code);
    mass += p;
    if (p > best) best = p;
  }
  if (objective == Objective::kCorrectMass) return best;
  if (loss == LossKind::kBinary) return mass - best;

  double risk = 0.0;
  for (int i = 0; i < table.n(); ++i) {
    if (revealed.is_revealed(i)) continue;
    std::vector<double> marginal(static_cast<std::size_t>(table.num_labels()), 0.0);
    for (std::uint64_t code = 0; code < table.size(); ++code)
      if (revealed.consistent(code, codec)) marginal[codec.label(code, i)] += table.prob(code);
    double top = marginal[0];
    for (std::size_t l = 1; l < marginal.size(); ++l) top = std::max(top, marginal[l]);
    risk += mass - top;
  }
  return risk;
}

double generic_bayes_risk(const PosteriorTable& table, const PartialLabeling& revealed, LossKind loss) {
  if (table.n() > 10) throw ValidationError("generic risk enumeration supports n <= 10");
  const auto& codec = table.codec();
  const LossFunction cost{loss};
  std::vector<std::uint64_t> consistent;
  for (std::uint64_t code = 0; code < table.size(); ++code)
    if (revealed.consistent(code, codec)) consistent.push_back(code);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t estimate : consistent) {
    double risk = 0.0;
    for (std::uint64_t truth : consistent) risk += table.prob(truth) * cost(codec, estimate, truth);
    best = std::min(best, risk);
  }
  return best;
}

namespace {

struct Candidate {
  std::shared_ptr<const PolicyTree> policy;
  double value;
};

// Every policy of the given depth from `revealed`, in enumeration order:
// item ascending, then child policies lexicographically with label 0 most
// significant.
std::vector<Candidate> all_policies(const PosteriorTable& table, const PartialLabeling& revealed, int depth,
                                    LossKind loss, Objective objective) {
  if (depth == 0) return {{std::make_shared<PolicyTree>(), terminal_value(table, revealed, loss, objective)}};
  std::vector<Candidate> out;
  const int num_labels = table.num_labels();
  for (int item = 0; item < table.n(); ++item) {
    if (revealed.is_revealed(item)) continue;
    std::vector<std::vector<Candidate>> per_label;
    for (int l = 0; l < num_labels; ++l)
      per_label.push_back(all_policies(table, revealed.with(item, l), depth - 1, loss, objective));
    std::vector<std::size_t> pick(static_cast<std::size_t>(num_labels), 0);
    while (true) {
      auto node = std::make_shared<PolicyTree>();
      node->item = item;
      double value = 0.0;
      for (int l = 0; l < num_labels; ++l) {
        node->children.push_back(per_label[l][pick[l]].policy);
        value += per_label[l][pick[l]].value;
      }
      out.push_back({node, value});
      int l = num_labels - 1;
      while (l >= 0 && ++pick[l] == per_label[l].size()) pick[l--] = 0;
      if (l < 0) break;
    }
  }
  return out;
}

double brute_batch_pc(const PosteriorTable& table, const std::vector<int>& items) {
  double total = 0.0;
  const int num_labels = table.num_labels();
  std::vector<int> labels(items.size(), 0);
  while (true) {
    PartialLabeling revealed(table.n());
    for (std::size_t t = 0; t < items.size(); ++t) revealed.reveal(items[t], labels[t]);
    total += terminal_value(table, revealed, LossKind::kBinary, Objective::kCorrectMass);
    std::size_t t = 0;
    while (t < labels.size() && ++labels[t] == num_labels) labels[t++] = 0;
    if (t == labels.size()) break;
  }
  return total;
}

}  // namespace

PolicySearchResult enumerate_adaptive_policies(const PosteriorTable& table, int budget, LossKind loss,
                                               std::optional<Objective> objective) {
  if (table.n() > 5) throw ValidationError("policy enumeration supports n <= 5");
  if (budget < 0 || budget > 2 || budget > table.n()) throw ValidationError("policy enumeration supports budget <= 2");
  const Objective obj = objective.value_or(loss == LossKind::kBinary ? Objective::kCorrectMass : Objective::kRisk);
  if (obj == Objective::kCorrectMass && loss != LossKind::kBinary)
    throw ValidationError("correct-mass objective requires binary loss");
  const auto candidates = all_policies(table, PartialLabeling(table.n()), budget, loss, obj);
  PolicySearchResult result;
  result.policies_evaluated = candidates.size();
  const bool maximize = obj == Objective::kCorrectMass;
  for (const auto& c : candidates) {
    if (!result.policy || (maximize ? c.value > result.value : c.value < result.value)) {
      result.value = c.value;
      result.policy = c.policy;
    }
  }
  return result;
}

BatchChoice best_batch_gamma_policy(const PosteriorTable& table, int budget) {
  const auto prefix = separable_prefix(table, budget);
  return {prefix.items, brute_batch_pc(table, prefix.items)};
}

BatchChoice best_batch_exhaustive(const PosteriorTable& table, int budget) {
  if (budget < 0 || budget > table.n()) throw ValidationError("query budget must lie in [0, n]");
  BatchChoice best;
  bool found = false;
  std::vector<int> items;
  auto recurse = [&](auto&& self, int start) -> void {
    if (static_cast<int>(items.size()) == budget) {
      const double pc = brute_batch_pc(table, items);
      if (!found || pc > best.pc) {
        best = {items, pc};
        found = true;
      }
      return;
    }
    for (int i = start; i < table.n(); ++i) {
      items.push_back(i);
      self(self, i + 1);
      items.pop_back();
    }
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace alq::oracle
