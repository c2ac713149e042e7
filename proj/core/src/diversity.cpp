#include "elicit/diversity.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "elicit/numeric.hpp"

namespace elicit {

OutputDistribution output_value_distribution(const MixtureParams& params,
                                             const PolicyTable& policy) {
  policy.validate(params.n);
  const auto counts = reveal_count_pmf(params, policy.k);
  std::map<int, double> mass;
  for (int a = 0; a <= policy.k; ++a) {
    mass[policy.zeros(a)] += counts.marginal[a];
  }
  OutputDistribution dist;
  dist.support.reserve(mass.size());
  dist.probability.reserve(mass.size());
  for (const auto& [value, prob] : mass) {
    dist.support.push_back(value);
    dist.probability.push_back(prob);
  }
  return dist;
}

double output_entropy(const OutputDistribution& dist, double base) {
  if (base <= 1.0) throw std::invalid_argument("output_entropy: base must exceed 1");
  CompensatedSum nats;
  for (double q : dist.probability) {
    if (q < 0.0) throw std::invalid_argument("output_entropy: negative probability");
    if (q > 0.0) nats.add(-q * std::log(q));
  }
  return nats.value() / std::log(base);
}

}  // namespace elicit
