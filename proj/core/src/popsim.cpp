#include "elicit/popsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "elicit/numeric.hpp"
#include "elicit/parallel.hpp"

namespace elicit {

namespace {

constexpr long long kMonteCarloBatch = 1 << 16;

// Weighted Gini over a discrete utility distribution; O(V^2) in the number of
// distinct values. Returns {gini, shift_applied}.
std::pair<double, double> weighted_gini(std::span<const double> values,
                                        std::span<const double> weights) {
  double lo = values.front(), hi = values.front();
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi) return {0.0, 0.0};
  const double shift = lo < 0.0 ? lo : 0.0;

  CompensatedSum total_weight, weighted_sum;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total_weight.add(weights[i]);
    weighted_sum.add(weights[i] * (values[i] - shift));
  }
  CompensatedSum pairwise;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < values.size(); ++j) {
      pairwise.add(weights[i] * weights[j] * std::abs(values[i] - values[j]));
    }
  }
  const double w = total_weight.value();
  const double mean = weighted_sum.value() / w;
  return {pairwise.value() / (2.0 * w * w * mean), shift};
}

// Shared aggregation from a distribution over mistake counts B = 0..n-k.
// Weights are probabilities (exhaustive) or sample counts (Monte Carlo).
SimulationReport aggregate(const MixtureParams& params, const PolicyTable& policy,
                           const WelfareSpec& spec, std::span<const double> gammas,
                           std::span<const double> weight_by_mistakes) {
  const int k = policy.k;
  const int guesses = params.n - k;

  std::vector<double> utilities(guesses + 1);
  for (int b = 0; b <= guesses; ++b) {
    utilities[b] = params.n - spec.query_cost * k - b;
  }

  CompensatedSum total, mean_sum;
  for (int b = 0; b <= guesses; ++b) {
    total.add(weight_by_mistakes[b]);
    mean_sum.add(weight_by_mistakes[b] * utilities[b]);
  }
  const double w = total.value();

  SimulationReport report;
  report.mean_utility = mean_sum.value() / w;

  std::vector<double> gamma_list(gammas.begin(), gammas.end());
  if (gamma_list.empty()) gamma_list.push_back(spec.gamma);
  for (double gamma : gamma_list) {
    double value;
    if (std::isinf(gamma)) {
      value = -(weight_by_mistakes[guesses] / w);
    } else {
      CompensatedSum sum;
      for (int b = 0; b <= guesses; ++b) {
        if (weight_by_mistakes[b] == 0.0) continue;
        sum.add((weight_by_mistakes[b] / w) * welfare_weight(utilities[b], gamma, spec.zero_shift));
      }
      value = gamma == 1.0 ? sum.value() : sum.value() / (1.0 - gamma);
    }
    report.welfare_by_gamma.emplace_back(gamma, value);
  }

  std::vector<double> present_values, present_weights;
  for (int b = guesses; b >= 0; --b) {  // ascending utility
    if (weight_by_mistakes[b] > 0.0) {
      present_values.push_back(utilities[b]);
      present_weights.push_back(weight_by_mistakes[b]);
    }
  }
  std::tie(report.gini, report.gini_shift) = weighted_gini(present_values, present_weights);
  for (std::size_t i = 0; i < present_values.size(); ++i) {
    report.utility_histogram.emplace_back(present_values[i], present_weights[i]);
  }
  return report;
}

}  // namespace

SimulationReport run_exhaustive(const MixtureParams& params, const PolicyTable& policy,
                                const WelfareSpec& spec, std::span<const double> gammas,
                                bool raw_enumeration) {
  policy.validate(params.n);
  if (params.n > 20) {
    throw std::invalid_argument("run_exhaustive: n exceeds the enumeration budget (20)");
  }
  const int n = params.n;
  const int k = policy.k;
  const int guesses = n - k;
  std::vector<double> weight(guesses + 1, 0.0);

  if (raw_enumeration) {
    // Walk every flip mask for both prototypes. Guessed-0 positions are the
    // first f(a) unrevealed slots; exchangeability makes the choice immaterial.
    std::vector<double> pow_flip(n + 1), pow_keep(n + 1);
    pow_flip[0] = pow_keep[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
      pow_flip[i] = pow_flip[i - 1] * params.p;
      pow_keep[i] = pow_keep[i - 1] * (1.0 - params.p);
    }
    for (int cluster = 0; cluster <= 1; ++cluster) {
      const double cluster_weight = cluster == 0 ? params.alpha : 1.0 - params.alpha;
      if (cluster_weight == 0.0) continue;
      const std::uint32_t prototype = cluster == 0 ? 0u : ~0u;
      for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        const int flips = std::popcount(mask);
        const double prob = cluster_weight * pow_flip[flips] * pow_keep[n - flips];
        if (prob == 0.0) continue;
        const std::uint32_t bits = (prototype ^ static_cast<std::uint32_t>(mask)) &
                                   ((n == 32 ? 0u : (1u << n)) - 1u);
        const int a = k == 0 ? 0 : std::popcount(bits & ((1u << k) - 1u));
        const int f = policy.zeros(a);
        int mistakes = 0;
        for (int i = k; i < k + f; ++i) mistakes += (bits >> i) & 1u;          // 0 guessed, bit 1
        for (int i = k + f; i < n; ++i) mistakes += 1 - ((bits >> i) & 1u);    // 1 guessed, bit 0
        weight[mistakes] += prob;
      }
    }
  } else {
    // Flip-count equivalence classes: for each cluster and revealed count,
    // enumerate flip counts inside the guessed-0 and guessed-1 blocks.
    for (int cluster = 0; cluster <= 1; ++cluster) {
      const double cluster_weight = cluster == 0 ? params.alpha : 1.0 - params.alpha;
      if (cluster_weight == 0.0) continue;
      // revealed 1s: flips under cluster 0, non-flips under cluster 1
      const auto reveal = binomial_pmf(k, cluster == 0 ? params.p : 1.0 - params.p);
      for (int a = 0; a <= k; ++a) {
        if (reveal[a] == 0.0) continue;
        const int f = policy.zeros(a);
        const int g = guesses - f;
        const auto zero_block_flips = binomial_pmf(f, params.p);
        const auto one_block_flips = binomial_pmf(g, params.p);
        for (int j = 0; j <= f; ++j) {
          if (zero_block_flips[j] == 0.0) continue;
          for (int t = 0; t <= g; ++t) {
            if (one_block_flips[t] == 0.0) continue;
            // cluster 0: flipped bits are 1s, so guessed 0s err on flips and
            // guessed 1s err on non-flips; mirrored for cluster 1
            const int mistakes = cluster == 0 ? j + (g - t) : (f - j) + t;
            weight[mistakes] += cluster_weight * reveal[a] * zero_block_flips[j] *
                                one_block_flips[t];
          }
        }
      }
    }
  }

  SimulationReport report = aggregate(params, policy, spec, gammas, weight);
  report.exhaustive = true;
  return report;
}

SimulationReport run_monte_carlo(const MixtureParams& params, const PolicyTable& policy,
                                 const WelfareSpec& spec, long long count, std::uint64_t seed,
                                 std::span<const double> gammas, int threads) {
  policy.validate(params.n);
  if (count < 1) throw std::invalid_argument("run_monte_carlo: count must be >= 1");

  const int n = params.n;
  const int k = policy.k;
  const int guesses = n - k;
  const std::size_t batches = static_cast<std::size_t>((count + kMonteCarloBatch - 1) /
                                                       kMonteCarloBatch);
  std::vector<std::vector<long long>> batch_counts(batches,
                                                   std::vector<long long>(guesses + 1, 0));

  parallel_for(batches, threads, [&](std::size_t b) {
    const long long begin = static_cast<long long>(b) * kMonteCarloBatch;
    const int batch_size = static_cast<int>(std::min<long long>(kMonteCarloBatch, count - begin));
    const std::uint64_t batch_seed = mix_seed(seed ^ (0xB5AD4ECEDA1CE2A9ull * (b + 1)));
    const auto users = sample_population(params, batch_size, batch_seed);
    auto& counts = batch_counts[b];
    for (const auto& user : users) {
      int a = 0;
      for (int i = 0; i < k; ++i) a += user.bits[i];
      const int f = policy.zeros(a);
      int mistakes = 0;
      for (int i = k; i < k + f; ++i) mistakes += user.bits[i];
      for (int i = k + f; i < n; ++i) mistakes += 1 - user.bits[i];
      ++counts[mistakes];
    }
  });

  std::vector<double> weight(guesses + 1, 0.0);
  for (const auto& counts : batch_counts) {
    for (int b = 0; b <= guesses; ++b) weight[b] += static_cast<double>(counts[b]);
  }

  SimulationReport report = aggregate(params, policy, spec, gammas, weight);
  report.sample_count = count;

  // standard error of the mean from the count histogram
  if (count > 1) {
    CompensatedSum sq;
    for (int b = 0; b <= guesses; ++b) {
      const double u = params.n - spec.query_cost * k - b;
      const double d = u - report.mean_utility;
      sq.add(weight[b] * d * d);
    }
    const double variance = sq.value() / static_cast<double>(count - 1);
    report.mean_utility_se = std::sqrt(variance / static_cast<double>(count));
  }
  return report;
}

double gini(std::span<const double> utilities) {
  if (utilities.empty()) throw std::invalid_argument("gini: empty input");
  std::vector<double> sorted(utilities.begin(), utilities.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0.0) throw std::invalid_argument("gini: negative utility");
  if (sorted.back() == 0.0) throw std::invalid_argument("gini: all utilities are zero");

  // G = 2 * sum(i * u_(i)) / (m * sum(u)) - (m + 1) / m  with 1-based ranks
  CompensatedSum total, ranked;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total.add(sorted[i]);
    ranked.add(static_cast<double>(i + 1) * sorted[i]);
  }
  const double m = static_cast<double>(sorted.size());
  return 2.0 * ranked.value() / (m * total.value()) - (m + 1.0) / m;
}

}  // namespace elicit
