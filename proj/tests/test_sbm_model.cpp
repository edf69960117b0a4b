#include <cmath>
#include <map>

#include "doctest.h"

#include "alq/error.hpp"
#include "alq/sbm_model.hpp"

using namespace alq;

namespace {

SbmParams pair_model(double q_in, double q_out) { return SbmParams{2, 2, q_in, q_out, {}}; }

}  // namespace

TEST_CASE("log-likelihood of small graphs") {
  Observation linked(2);
  linked.set_edge(0, 1);
  CHECK(log_likelihood(pair_model(0.36, 0.05), LabelConfig{0}, linked) == doctest::Approx(-1.021651).epsilon(1e-6));
  CHECK(log_likelihood(pair_model(0.36, 0.05), LabelConfig{0}, linked) == doctest::Approx(std::log(0.36)));

  Observation empty(2);
  CHECK(log_likelihood(pair_model(0.36, 0.05), LabelConfig{1}, empty) == doctest::Approx(std::log(0.95)));

  SbmParams single{1, 2, 0.3, 0.1, {}};
  CHECK(log_likelihood(single, LabelConfig{1}, Observation(1)) == 0.0);
}

TEST_CASE("pair-count kernel agrees with the pairwise sum") {
  SbmParams p{6, 3, 0.7, 0.2, {}};
  RandomStream rng(3, 0);
  const LabelCodec codec(p.n, p.num_labels);
  for (int t = 0; t < 20; ++t) {
    const auto truth = sample_labels(p, rng);
    const auto obs = sample_observation(p, truth, rng);
    const LikelihoodKernel kernel(p, obs);
    for (std::uint64_t c = 0; c < codec.config_count(); c += 17) {
      const auto labels = codec.unpack(c);
      CHECK(kernel(labels) == doctest::Approx(log_likelihood(p, LabelConfig{c}, obs)).epsilon(1e-12));
    }
  }
}

TEST_CASE("likelihood sums to one over all graphs") {
  for (int n = 1; n <= 4; ++n) {
    SbmParams p{n, 2, 0.6, 0.25, {}};
    const int pairs = n * (n - 1) / 2;
    const LabelCodec codec(n, 2);
    for (std::uint64_t c = 0; c < codec.config_count(); ++c) {
      double total = 0.0;
      for (int g = 0; g < (1 << pairs); ++g) {
        Observation obs(n);
        int bit = 0;
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j, ++bit)
            if (g >> bit & 1) obs.set_edge(i, j);
        total += std::exp(log_likelihood(p, LabelConfig{c}, obs));
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("sampling frequencies match the model") {
  SbmParams p{3, 2, 0.8, 0.1, {0.7, 0.3}};
  RandomStream rng(11, 0);
  const int draws = 200000;
  int label_one = 0, same_pairs = 0, same_edges = 0, diff_pairs = 0, diff_edges = 0;
  const LabelCodec codec(p.n, p.num_labels);
  for (int t = 0; t < draws; ++t) {
    const auto truth = sample_labels(p, rng);
    const auto obs = sample_observation(p, truth, rng);
    label_one += codec.label(truth.code, 0);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        const bool same = codec.label(truth.code, i) == codec.label(truth.code, j);
        (same ? same_pairs : diff_pairs) += 1;
        if (obs.has_edge(i, j)) (same ? same_edges : diff_edges) += 1;
      }
  }
  CHECK(label_one / double(draws) == doctest::Approx(0.3).epsilon(0.02));
  CHECK(same_edges / double(same_pairs) == doctest::Approx(0.8).epsilon(0.01));
  CHECK(diff_edges / double(diff_pairs) == doctest::Approx(0.1).epsilon(0.03));
}

TEST_CASE("random streams are reproducible and independent") {
  RandomStream a(5, 2), b(5, 2), c(5, 3);
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("codec round trip and string form") {
  const LabelCodec codec(4, 3);
  for (std::uint64_t c = 0; c < codec.config_count(); ++c) CHECK(codec.pack(codec.unpack(c)) == c);
  CHECK(codec.to_string(codec.pack(std::vector<int>{0, 1, 2, 1})) == "0121");
}

TEST_CASE("validation rejects bad parameters") {
  CHECK_THROWS_AS(SbmParams({0, 2, 0.5, 0.1, {}}).validate(), ValidationError);
  CHECK_THROWS_AS(SbmParams({3, 1, 0.5, 0.1, {}}).validate(), ValidationError);
  CHECK_THROWS_AS(SbmParams({3, 2, 1.5, 0.1, {}}).validate(), ValidationError);
  CHECK_THROWS_AS(SbmParams({3, 2, 0.5, 0.1, {0.2, 0.2}}).validate(), ValidationError);
  CHECK_NOTHROW(SbmParams({3, 2, 0.5, 0.1, {0.2, 0.8}}).validate());
}

TEST_CASE("scenario rates use the natural log") {
  ScenarioConfig c;
  c.a = 2.0;
  c.b = 0.25;
  c.n = 15;
  CHECK(c.q_in() == doctest::Approx(2.0 * std::log(15.0) / 15.0));
  CHECK(c.q_out() == doctest::Approx(0.25 * std::log(15.0) / 15.0));
  CHECK(c.eta() == doctest::Approx((std::sqrt(2.0) - 0.5) / std::sqrt(2.0)));
  const auto defaults = default_scenarios();
  REQUIRE(defaults.size() == 3);
  CHECK(defaults[2].a == 3.0);
  CHECK(defaults[2].b == 0.15);
}
