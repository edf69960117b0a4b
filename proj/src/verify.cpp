#include <cmath>
#include <sstream>

#include "alq/entropy_bounds.hpp"
#include "alq/error.hpp"
#include "alq/oracle.hpp"
#include "alq/rng.hpp"

namespace alq::oracle {

bool VerifySummary::ok() const {
  for (const auto& c : checks)
    if (c.failed > 0) return false;
  return instances > 0;
}

namespace {

class Recorder {
 public:
  void record(const std::string& name, bool ok, const std::string& context) {
    auto& c = find(name);
    if (ok) {
      ++c.passed;
    } else {
      if (c.failed++ == 0) c.first_failure = context;
    }
  }
  std::vector<VerifyCheck> take() { return std::move(checks_); }

 private:
  VerifyCheck& find(const std::string& name) {
    for (auto& c : checks_)
      if (c.name == name) return c;
    checks_.push_back({name, 0, 0, {}});
    return checks_.back();
  }
  std::vector<VerifyCheck> checks_;
};

bool close_relative(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-300;
}

}  // namespace

VerifySummary run_verify_suite(const VerifyOptions& options) {
  if (options.trials < 1) throw ValidationError("trials must be positive");
  if (options.max_n < 1 || options.max_n > 5) throw ValidationError("max-n must lie in [1, 5]");
  if (options.max_m < 0 || options.max_m > 2) throw ValidationError("max-m must lie in [0, 2]");

  Recorder rec;
  VerifySummary summary;
  for (int t = 0; t < options.trials; ++t) {
    RandomStream rng(options.seed, static_cast<std::uint64_t>(t));
    SbmParams params;
    params.n = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(options.max_n));
    params.num_labels = (params.n <= 4 && rng.uniform() < 0.3) ? 3 : 2;
    params.q_out = 0.02 + 0.48 * rng.uniform();
    params.q_in = params.q_out + (0.99 - params.q_out) * (0.05 + 0.95 * rng.uniform());
    if (rng.uniform() < 0.5) {
      std::vector<double> prior(static_cast<std::size_t>(params.num_labels));
      double total = 0.0;
      for (double& p : prior) total += (p = 0.1 + rng.uniform());
      for (double& p : prior) p /= total;
      // Push the rounding residue into the last entry so the sum is 1.
      double head = 0.0;
      for (std::size_t i = 0; i + 1 < prior.size(); ++i) head += prior[i];
      prior.back() = 1.0 - head;
      params.label_prior = prior;
    }
    const auto truth = sample_labels(params, rng);
    const auto obs = sample_observation(params, truth, rng);
    const auto table = compute_posterior(params, obs);
    ++summary.instances;

    std::ostringstream ctx;
    ctx << "trial " << t << " (n=" << params.n << ", |L|=" << params.num_labels << ")";

    if (params.n <= 4) {
      const auto brute = brute_posterior(params, obs);
      bool ok = true;
      for (std::uint64_t c = 0; c < table.size(); ++c) ok &= close_relative(brute[c], table.prob(c), 1e-12);
      rec.record("posterior vs direct product", ok, ctx.str());
    }

    const int top_budget = std::min(options.max_m, params.n);
    const auto curve = pc_ssp_curve(table, params.n);
    for (int m = 0; m <= top_budget; ++m) {
      const std::string where = ctx.str() + " M=" + std::to_string(m);

      const auto map_plan = build_plan(table, m, LossKind::kBinary);
      const auto map_oracle = enumerate_adaptive_policies(table, m, LossKind::kBinary);
      rec.record("binary correct-mass DP == enumeration", map_plan.root_value() == map_oracle.value, where);

      const auto risk_plan = build_plan(table, m, LossKind::kBinary, Objective::kRisk);
      const auto risk_oracle = enumerate_adaptive_policies(table, m, LossKind::kBinary, Objective::kRisk);
      rec.record("binary risk DP == enumeration", risk_plan.root_value() == risk_oracle.value, where);
      rec.record("binary risk == 1 - correct mass",
                 std::abs(risk_plan.root_value() - (1.0 - map_plan.root_value())) <= 1e-12, where);

      const auto ham_plan = build_plan(table, m, LossKind::kHamming);
      const auto ham_oracle = enumerate_adaptive_policies(table, m, LossKind::kHamming);
      rec.record("hamming risk DP == enumeration", ham_plan.root_value() == ham_oracle.value, where);

      rec.record("leaf path sum == root", std::abs(pc_ssp(map_plan, table) - map_plan.root_value()) <= 1e-12, where);
      rec.record("dense sweep == DP root", curve[m] == map_plan.root_value(), where);

      const auto batch = best_batch_exhaustive(table, m);
      rec.record("best batch <= adaptive", batch.pc <= map_plan.root_value() + 1e-12, where);

      const auto gamma_batch = best_batch_gamma_policy(table, m);
      const auto prefix = separable_prefix(table, m);
      double prefix_mass = 0.0;
      for (std::uint64_t i = 0; i < prefix.count; ++i) prefix_mass += table.prob_at_rank(i);
      rec.record("separable-prefix batch covers prefix", gamma_batch.pc >= prefix_mass - 1e-12, where);
    }
    for (int m = 1; m <= params.n; ++m)
      rec.record("Pc nondecreasing in budget", curve[m] >= curve[m - 1], ctx.str() + " M=" + std::to_string(m));
  }
  summary.checks = rec.take();
  return summary;
}

}  // namespace alq::oracle
