#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "elicit/welfare.hpp"

namespace elicit {

/// Aggregate results of simulating a population against a fixed policy.
/// Histogram weights are exact probabilities in exhaustive mode and raw
/// counts in Monte Carlo mode.
struct SimulationReport {
  double mean_utility = 0.0;
  double mean_utility_se = 0.0;  // Monte Carlo only; 0 in exhaustive mode
  std::vector<std::pair<double, double>> welfare_by_gamma;   // (gamma, welfare)
  double gini = 0.0;
  double gini_shift = 0.0;  // min utility subtracted before Gini, when negative
  std::vector<std::pair<double, double>> utility_histogram;  // (utility, weight)
  bool exhaustive = false;
  long long sample_count = 0;  // 0 in exhaustive mode
};

/// Exact expectation over both clusters and all flip outcomes. The default
/// enumerates flip-count equivalence classes with binomial weights
/// (O(k (n-k)^2)); raw_enumeration walks all 2^n flip masks per cluster
/// instead, as a structurally independent cross-check. n is capped at 20.
SimulationReport run_exhaustive(const MixtureParams& params, const PolicyTable& policy,
                                const WelfareSpec& spec, std::span<const double> gammas = {},
                                bool raw_enumeration = false);

/// Samples `count` users with sample_population and simulates the
/// interaction. Deterministic given the seed for any thread count: work is
/// split into fixed-size batches whose sub-seeds derive from the root seed.
SimulationReport run_monte_carlo(const MixtureParams& params, const PolicyTable& policy,
                                 const WelfareSpec& spec, long long count, std::uint64_t seed,
                                 std::span<const double> gammas = {}, int threads = 1);

/// Standard Gini coefficient of a utility sample: mean absolute difference
/// normalized by twice the mean. Inputs must be non-negative with at least
/// one strictly positive value.
double gini(std::span<const double> utilities);

}  // namespace elicit
