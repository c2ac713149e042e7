#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace elicit {

/// Two-cluster Bernoulli mixture over n binary preference features.
/// A user joins cluster 0 with probability alpha (prototype all-0s) or
/// cluster 1 otherwise (prototype all-1s); every bit of the prototype is then
/// flipped independently with probability p.
struct MixtureParams {
  int n;
  double p;      // per-bit flip probability, in [0, 0.5]
  double alpha;  // prior probability of cluster 0

  MixtureParams(int n, double p, double alpha);
};

struct PreferenceVector {
  std::vector<std::uint8_t> bits;
  std::optional<int> origin_cluster;  // known for synthetic samples only
};

/// What querying reveals to the model. All bits are exchangeable, so only the
/// count of 1s among the k answers carries information.
struct RevealedSummary {
  int k;     // number of queried features, in [0, n]
  int ones;  // count of 1s among the answers, in [0, k]
};

struct ClusterPosterior {
  double cluster0;
  double cluster1;
};

/// Distributions of the revealed-ones count for a fixed k, indexed by the
/// count 0..k: Binomial(k, p) under cluster 0, Binomial(k, 1-p) under
/// cluster 1, and their alpha-mixture.
struct RevealCountPmf {
  std::vector<double> cluster0;
  std::vector<double> cluster1;
  std::vector<double> marginal;
};

/// Draws `count` users from the mixture. Deterministic given the seed.
std::vector<PreferenceVector> sample_population(const MixtureParams& params, int count,
                                                std::uint64_t seed);

/// Probability of observing exactly this bit vector under the mixture.
double vector_pmf(const MixtureParams& params, std::span<const std::uint8_t> bits);

/// Posterior over the cluster of origin given a revealed summary, normalized
/// in log space. k = 0 returns the prior. Throws std::domain_error when the
/// observation has zero likelihood under both clusters (possible only at the
/// p = 0 boundary).
ClusterPosterior cluster_posterior(const MixtureParams& params, const RevealedSummary& summary);

RevealCountPmf reveal_count_pmf(const MixtureParams& params, int k);

}  // namespace elicit
