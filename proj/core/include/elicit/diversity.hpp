#pragma once

#include <vector>

#include "elicit/welfare.hpp"

namespace elicit {

/// Distribution over the distinct response values a policy can emit, i.e. the
/// pushforward of the revealed-count marginal through a -> f(a). Diversity is
/// measured over these f values, not over full n-bit outputs: the revealed
/// bits echo each user and carry no model-side variety.
struct OutputDistribution {
  std::vector<int> support;          // distinct f values, ascending
  std::vector<double> probability;   // same order, sums to 1
};

OutputDistribution output_value_distribution(const MixtureParams& params,
                                             const PolicyTable& policy);

/// Shannon entropy of the distribution, base 2 by default (0 log 0 = 0).
double output_entropy(const OutputDistribution& dist, double base = 2.0);

}  // namespace elicit
