#include "alq/sbm_model.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "alq/error.hpp"

namespace alq {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

void SbmParams::validate() const {
  require(n >= 1, "n must be positive");
  require(num_labels >= 2, "num_labels must be at least 2");
  require(std::isfinite(q_in) && std::isfinite(q_out), "edge probabilities must be finite");
  require(0.0 < q_out && q_out < q_in && q_in < 1.0, "edge probabilities must satisfy 0 < q_out < q_in < 1");
  require(n * std::log2(static_cast<double>(num_labels)) <= kEnumerationBitCap + 1e-12,
          "n*log2(num_labels) exceeds the enumeration cap of 26 bits");
  if (!label_prior.empty()) {
    require(static_cast<int>(label_prior.size()) == num_labels, "label_prior length must equal num_labels");
    double total = 0.0;
    for (double p : label_prior) {
      require(std::isfinite(p) && p >= 0.0, "label_prior entries must be nonnegative");
      total += p;
    }
    require(std::abs(total - 1.0) <= 1e-12, "label_prior must sum to 1");
  }
}

std::vector<double> SbmParams::prior() const {
  if (!label_prior.empty()) return label_prior;
  return std::vector<double>(static_cast<std::size_t>(num_labels), 1.0 / num_labels);
}

std::uint64_t SbmParams::config_count() const { return LabelCodec(n, num_labels).config_count(); }

LabelCodec::LabelCodec(int n, int num_labels) : n_(n), num_labels_(num_labels) {
  require(n >= 0 && num_labels >= 1, "invalid codec dimensions");
  powers_.resize(static_cast<std::size_t>(n) + 1);
  powers_[0] = 1;
  for (int i = 1; i <= n; ++i) {
    const auto prev = powers_[i - 1];
    require(prev <= (std::uint64_t{1} << 40) / static_cast<std::uint64_t>(num_labels),
            "label configuration space too large");
    powers_[i] = prev * static_cast<std::uint64_t>(num_labels);
  }
}

std::vector<int> LabelCodec::unpack(std::uint64_t code) const {
  std::vector<int> labels(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    labels[i] = static_cast<int>(code % static_cast<std::uint64_t>(num_labels_));
    code /= static_cast<std::uint64_t>(num_labels_);
  }
  return labels;
}

std::uint64_t LabelCodec::pack(std::span<const int> labels) const {
  require(static_cast<int>(labels.size()) == n_, "label vector has wrong length");
  std::uint64_t code = 0;
  for (int i = n_ - 1; i >= 0; --i) {
    require(labels[i] >= 0 && labels[i] < num_labels_, "label out of range");
    code = code * static_cast<std::uint64_t>(num_labels_) + static_cast<std::uint64_t>(labels[i]);
  }
  return code;
}

std::string LabelCodec::to_string(std::uint64_t code) const {
  std::string out;
  for (int label : unpack(code)) {
    // Labels beyond 9 would be ambiguous as single characters.
    out += label < 10 ? static_cast<char>('0' + label) : static_cast<char>('a' + label - 10);
  }
  return out;
}

Observation::Observation(int n) : n_(n), adjacency_(static_cast<std::size_t>(n > 0 ? n : 0), 0u) {
  require(n >= 0 && n <= 32, "observation supports at most 32 items");
}

bool Observation::has_edge(int i, int j) const {
  require(i >= 0 && j >= 0 && i < n_ && j < n_, "edge index out of range");
  if (i == j) return false;
  return (adjacency_[i] >> j) & 1u;
}

void Observation::set_edge(int i, int j, bool present) {
  require(i >= 0 && j >= 0 && i < n_ && j < n_, "edge index out of range");
  require(i != j, "self-loops are not allowed");
  if (present) {
    adjacency_[i] |= 1u << j;
    adjacency_[j] |= 1u << i;
  } else {
    adjacency_[i] &= ~(1u << j);
    adjacency_[j] &= ~(1u << i);
  }
}

int Observation::edge_count() const {
  int twice = 0;
  for (auto mask : adjacency_) twice += std::popcount(mask);
  return twice / 2;
}

std::vector<std::pair<int, int>> Observation::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if ((adjacency_[i] >> j) & 1u) out.emplace_back(i, j);
  return out;
}

void AlphaGrid::validate() const {
  require(beta_points >= 2 && alpha_points >= 2, "alpha grids need at least two points");
  require(beta_min_offset > 0.0 && beta_max > 1.0 + beta_min_offset, "beta grid must lie inside (1, beta_max]");
  require(refine_rel_tol > 0.0, "refinement tolerance must be positive");
  require(alpha_min > 1.0 && alpha_max > alpha_min, "alpha grid must lie inside (1, inf)");
}

double ScenarioConfig::q_in() const { return a * std::log(static_cast<double>(n)) / n; }
double ScenarioConfig::q_out() const { return b * std::log(static_cast<double>(n)) / n; }
double ScenarioConfig::eta() const { return (std::sqrt(a) - std::sqrt(b)) / std::sqrt(2.0); }

SbmParams ScenarioConfig::params() const {
  SbmParams p;
  p.n = n;
  p.num_labels = num_labels;
  p.q_in = q_in();
  p.q_out = q_out();
  return p;
}

void ScenarioConfig::validate() const {
  require(n >= 2, "scenario needs at least two items");
  require(m_max >= 0 && m_max <= n, "m_max must lie in [0, n]");
  require(realizations >= 1, "realizations must be positive");
  require(a > 0.0 && b > 0.0, "rate constants must be positive");
  params().validate();
  alpha_grid.validate();
}

std::vector<ScenarioConfig> default_scenarios() {
  std::vector<ScenarioConfig> out;
  const std::pair<double, double> rates[] = {{2.0, 0.25}, {2.0, 0.15}, {3.0, 0.15}};
  int index = 1;
  for (auto [a, b] : rates) {
    ScenarioConfig c;
    c.id = "scenario" + std::to_string(index++);
    c.a = a;
    c.b = b;
    c.n = 15;
    c.num_labels = 2;
    c.m_max = 10;
    c.realizations = 50;
    c.seed = 20240601;
    out.push_back(c);
  }
  return out;
}

LabelConfig sample_labels(const SbmParams& params, RandomStream& rng) {
  const auto prior = params.prior();
  const LabelCodec codec(params.n, params.num_labels);
  std::vector<int> labels(static_cast<std::size_t>(params.n));
  for (int i = 0; i < params.n; ++i) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    int chosen = -1;
    for (int l = 0; l < params.num_labels; ++l) {
      cumulative += prior[l];
      if (prior[l] > 0.0 && u < cumulative) {
        chosen = l;
        break;
      }
    }
    if (chosen < 0) {
      // u landed in the rounding gap above the last cumulative sum.
      for (int l = params.num_labels - 1; l >= 0; --l)
        if (prior[l] > 0.0) {
          chosen = l;
          break;
        }
    }
    labels[i] = chosen;
  }
  return {codec.pack(labels)};
}

Observation sample_observation(const SbmParams& params, LabelConfig labels, RandomStream& rng) {
  const LabelCodec codec(params.n, params.num_labels);
  require(labels.code < codec.config_count(), "label configuration out of range");
  const auto lab = codec.unpack(labels.code);
  Observation obs(params.n);
  for (int i = 0; i < params.n; ++i) {
    for (int j = i + 1; j < params.n; ++j) {
      const double delta = lab[i] == lab[j] ? params.q_in : params.q_out;
      if (rng.uniform() <= delta) obs.set_edge(i, j);
    }
  }
  return obs;
}

double log_likelihood(const SbmParams& params, LabelConfig labels, const Observation& obs) {
  require(obs.n() == params.n, "observation size does not match model size");
  const LabelCodec codec(params.n, params.num_labels);
  require(labels.code < codec.config_count(), "label configuration out of range");
  const auto lab = codec.unpack(labels.code);
  return LikelihoodKernel(params, obs)(lab);
}

LikelihoodKernel::LikelihoodKernel(const SbmParams& params, const Observation& obs)
    : n_(params.n),
      num_labels_(params.num_labels),
      total_pairs_(static_cast<std::int64_t>(params.n) * (params.n - 1) / 2),
      total_edges_(obs.edge_count()),
      log_q_in_(std::log(params.q_in)),
      log_not_q_in_(std::log1p(-params.q_in)),
      log_q_out_(std::log(params.q_out)),
      log_not_q_out_(std::log1p(-params.q_out)) {
  require(obs.n() == params.n, "observation size does not match model size");
  adjacency_.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) adjacency_[i] = obs.neighbors(i);
}

double LikelihoodKernel::operator()(std::span<const int> labels) const {
  // Class membership masks; |L| is small whenever n is nontrivial.
  std::uint32_t masks_small[8] = {};
  std::vector<std::uint32_t> masks_large;
  std::uint32_t* masks = masks_small;
  if (num_labels_ > 8) {
    masks_large.assign(static_cast<std::size_t>(num_labels_), 0u);
    masks = masks_large.data();
  }
  for (int i = 0; i < n_; ++i) masks[labels[i]] |= 1u << i;

  std::int64_t same_pairs = 0;
  for (int l = 0; l < num_labels_; ++l) {
    const std::int64_t c = std::popcount(masks[l]);
    same_pairs += c * (c - 1) / 2;
  }
  std::int64_t twice_same_edges = 0;
  for (int i = 0; i < n_; ++i) twice_same_edges += std::popcount(adjacency_[i] & masks[labels[i]]);
  const std::int64_t same_edges = twice_same_edges / 2;
  const std::int64_t cross_edges = total_edges_ - same_edges;
  const std::int64_t cross_pairs = total_pairs_ - same_pairs;

  return static_cast<double>(same_edges) * log_q_in_ +
         static_cast<double>(same_pairs - same_edges) * log_not_q_in_ +
         static_cast<double>(cross_edges) * log_q_out_ +
         static_cast<double>(cross_pairs - cross_edges) * log_not_q_out_;
}

}  // namespace alq
