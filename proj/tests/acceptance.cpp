// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "alq/entropy_bounds.hpp"
#include "alq/oracle.hpp"
#include "alq/posterior.hpp"
#include "alq/query_policy.hpp"
#include "alq/rng.hpp"
#include "alq/simulation.hpp"

using namespace alq;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string csv_of(const std::vector<ScenarioResult>& results) {
  std::ostringstream out;
  write_results_csv(out, results);
  return out.str();
}

PosteriorTable table_from(int n, std::vector<double> probs) {
  return PosteriorTable::from_probabilities(n, 2, probs);
}

}  // namespace

int main() {
  // Monte Carlo scenarios, single worker. Shared by the threshold, sandwich,
  // invariance and determinism criteria.
  const auto scenarios = default_scenarios();
  auto start = std::chrono::steady_clock::now();
  std::vector<ScenarioResult> results;
  for (const auto& s : scenarios) results.push_back(run_scenario(s, RunOptions{1}));
  const double sim_seconds = seconds_since(start);

  {
    const int expected[] = {1, 3, 7};
    bool ok = sim_seconds <= 15 * 60;
    std::ostringstream detail;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto m = results[i].smallest_budget_above(0.75);
      const auto& c = results[i].config;
      ok &= m && std::abs(*m - expected[i]) <= 1;
      detail << c.id << " (a=" << c.a << ", b=" << c.b << ", eta=" << format_double(c.eta()) << ") M*="
             << (m ? std::to_string(*m) : "none") << " expected " << expected[i] << "+-1";
      if (m) {
        const auto& row = results[i].rows[static_cast<std::size_t>(*m)];
        detail << " [mean Pc " << format_double(row.pc_exact_mean) << " se " << format_double(row.pc_exact_se) << "]";
      }
      detail << "; ";
    }
    detail << "runtime " << format_double(std::round(sim_seconds * 10) / 10) << " s";
    report(ok, "scenario thresholds (N=15, 50 realizations, mean Pc > 0.75)", detail.str());
  }

  {
    std::size_t checked = 0, violations = 0;
    std::string first;
    for (const auto& res : results)
      for (const auto& real : res.realizations)
        for (const auto& rep : real.reports) {
          if (rep.budget > 8) continue;
          ++checked;
          const auto v = sandwich_violations(rep, real.map_prob);
          violations += v.size();
          if (!v.empty() && first.empty())
            first = res.config.id + " realization " + std::to_string(real.index) + " M=" +
                    std::to_string(rep.budget) + ": " + v.front();
        }
    report(violations == 0, "bound sandwich for every realization and M <= 8",
           std::to_string(checked) + " reports, " + std::to_string(violations) + " violations" +
               (first.empty() ? "" : " (first: " + first + ")"));
  }

  {
    start = std::chrono::steady_clock::now();
    oracle::VerifyOptions opts;
    opts.trials = 200;
    opts.seed = 7;
    const auto summary = oracle::run_verify_suite(opts);
    const double secs = seconds_since(start);
    std::uint64_t compared = 0, failed = 0;
    for (const auto& c : summary.checks) {
      if (c.name.find("== enumeration") == std::string::npos) continue;
      compared += c.passed + c.failed;
      failed += c.failed;
    }
    std::ostringstream detail;
    detail << summary.instances << " instances, " << compared << " exact DP/enumeration comparisons (binary and "
           << "hamming), " << failed << " mismatches, all oracle checks " << (summary.ok() ? "ok" : "NOT ok") << ", "
           << format_double(std::round(secs * 100) / 100) << " s";
    report(summary.ok() && summary.instances >= 200 && secs <= 120.0, "oracle equivalence", detail.str());
  }

  {
    const auto uniform = table_from(3, std::vector<double>(8, 0.125));
    const double pc_plan = build_plan(uniform, 1, LossKind::kBinary).root_value();
    const double pc_curve = pc_ssp_curve(uniform, 1)[1];
    const double upper = renyi_upper_bound(uniform, 1);
    const auto gain = ordered_gain_bounds(uniform, 1);
    const double g = al_gain(uniform, pc_plan);
    const bool ok = pc_plan == 0.25 && pc_curve == 0.25 && upper <= 0.2501 && gain.lower <= g && g <= gain.upper &&
                    gain.lower <= 2.0 && 2.0 <= gain.upper;
    std::ostringstream detail;
    detail << "pc " << format_double(pc_plan) << ", upper bound " << format_double(upper) << ", gain "
           << format_double(g) << " in [" << format_double(gain.lower) << ", " << format_double(gain.upper) << "]";
    report(ok, "closed form, uniform over 8 configurations, M=1", detail.str());
  }

  {
    std::vector<double> point(8, 0.0);
    point[5] = 1.0;
    const auto point_table = table_from(3, point);
    double worst = 0.0;
    for (int m = 0; m <= 3; ++m)
      worst = std::max(worst, std::abs(renyi_lower_bound(point_table, m, true).value - 1.0));
    std::vector<double> pair(8, 0.0);
    pair[0] = pair[7] = 0.5;
    const auto pair_table = table_from(3, pair);
    const double pair_bound = renyi_lower_bound(pair_table, 0, is_permutation_invariant(pair_table)).value;
    std::ostringstream detail;
    detail << "point mass |bound - 1| = " << format_double(worst) << "; two equal configurations, M=0 bound "
           << format_double(pair_bound);
    report(worst <= 1e-6 && pair_bound >= 0.499, "lower-bound tightness probes", detail.str());
  }

  {
    double uniform_err = 0.0;
    for (int k : {2, 3, 7, 64})
      for (double a : {0.5, 2.0, 10.0})
        uniform_err =
            std::max(uniform_err, std::abs(renyi_entropy(std::vector<double>(k, 1.0 / k), a) - std::log(k)));

    RandomStream rng(99, 0);
    const std::vector<double> orders = {0.1, 0.5, 0.9, 0.99, 1.01, 1.5, 2.0, 5.0, 20.0, 100.0};
    int monotone_bad = 0;
    double shannon_err = 0.0;
    for (int t = 0; t < 100; ++t) {
      const int k = 2 + static_cast<int>(rng.next() % 30);
      std::vector<double> p(k);
      double total = 0.0;
      for (double& x : p) total += (x = rng.uniform() * rng.uniform() + 1e-6);
      for (double& x : p) x /= total;
      double prev = renyi_entropy(p, orders[0]);
      for (std::size_t i = 1; i < orders.size(); ++i) {
        const double h = renyi_entropy(p, orders[i]);
        if (h > prev + 1e-12) ++monotone_bad;
        prev = h;
      }
      const double sh = shannon_entropy(p);
      shannon_err = std::max({shannon_err, std::abs(renyi_entropy(p, 1.0 + 1e-6) - sh),
                              std::abs(renyi_entropy(p, 1.0 - 1e-6) - sh)});
    }
    std::ostringstream detail;
    detail << "uniform max error " << uniform_err << ", monotonicity violations " << monotone_bad
           << " over 100 distributions, Shannon-limit error " << shannon_err;
    report(uniform_err <= 1e-12 && monotone_bad == 0 && shannon_err <= 1e-4, "Renyi entropy properties",
           detail.str());
  }

  {
    std::size_t total = 0, not_invariant = 0, above_half = 0;
    double largest = 0.0;
    for (const auto& res : results)
      for (const auto& real : res.realizations) {
        ++total;
        not_invariant += real.perm_invariant ? 0 : 1;
        above_half += real.map_prob > 0.5 ? 1 : 0;
        largest = std::max(largest, real.map_prob);
      }
    std::ostringstream detail;
    detail << total << " realizations, " << not_invariant << " not permutation invariant, " << above_half
           << " with MAP posterior above 1/2 (largest " << format_double(largest) << ")";
    report(not_invariant == 0 && above_half == 0, "permutation invariance of uniform-prior posteriors",
           detail.str());
  }

  {
    start = std::chrono::steady_clock::now();
    std::vector<ScenarioResult> threaded;
    for (const auto& s : scenarios) threaded.push_back(run_scenario(s, RunOptions{8}));
    const std::string one = csv_of(results);
    const std::string eight = csv_of(threaded);
    std::ostringstream detail;
    detail << "1-thread and 8-thread results.csv are " << (one == eight ? "byte-identical" : "DIFFERENT") << " ("
           << one.size() << " bytes, 8-thread run " << format_double(std::round(seconds_since(start) * 10) / 10)
           << " s)";
    report(one == eight, "determinism across worker counts", detail.str());
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
