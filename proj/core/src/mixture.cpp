#include "elicit/mixture.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "elicit/numeric.hpp"

namespace elicit {

MixtureParams::MixtureParams(int n_, double p_, double alpha_) : n(n_), p(p_), alpha(alpha_) {
  if (n < 1) throw std::invalid_argument("MixtureParams: n must be >= 1");
  if (!(p >= 0.0 && p <= 0.5)) throw std::invalid_argument("MixtureParams: p must be in [0, 0.5]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("MixtureParams: alpha must be in [0, 1]");
  }
}

std::vector<PreferenceVector> sample_population(const MixtureParams& params, int count,
                                                std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_population: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<PreferenceVector> users;
  users.reserve(count);
  for (int u = 0; u < count; ++u) {
    PreferenceVector v;
    const int cluster = canonical_uniform(rng()) < params.alpha ? 0 : 1;
    v.origin_cluster = cluster;
    v.bits.resize(params.n);
    const std::uint8_t prototype = cluster == 0 ? 0 : 1;
    for (int i = 0; i < params.n; ++i) {
      const bool flip = canonical_uniform(rng()) < params.p;
      v.bits[i] = flip ? static_cast<std::uint8_t>(1 - prototype) : prototype;
    }
    users.push_back(std::move(v));
  }
  return users;
}

double vector_pmf(const MixtureParams& params, std::span<const std::uint8_t> bits) {
  if (static_cast<int>(bits.size()) != params.n) {
    throw std::invalid_argument("vector_pmf: bit vector length differs from n");
  }
  int ones = 0;
  for (auto b : bits) ones += b ? 1 : 0;
  const int zeros = params.n - ones;
  // 0^0 = 1 at the p boundaries; std::pow already guarantees pow(0,0) == 1.
  const double c0 = params.alpha * std::pow(params.p, ones) * std::pow(1.0 - params.p, zeros);
  const double c1 =
      (1.0 - params.alpha) * std::pow(1.0 - params.p, ones) * std::pow(params.p, zeros);
  return c0 + c1;
}

ClusterPosterior cluster_posterior(const MixtureParams& params, const RevealedSummary& summary) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (summary.k < 0 || summary.k > params.n || summary.ones < 0 || summary.ones > summary.k) {
    throw std::invalid_argument("cluster_posterior: summary violates 0 <= ones <= k <= n");
  }
  if (summary.k == 0) return {params.alpha, 1.0 - params.alpha};

  const auto lp0 = binomial_log_pmf(summary.k, params.p);        // ones ~ Binom(k, p)
  const auto lp1 = binomial_log_pmf(summary.k, 1.0 - params.p);  // ones ~ Binom(k, 1-p)
  const double la = params.alpha > 0.0 ? std::log(params.alpha) : kNegInf;
  const double l1a = params.alpha < 1.0 ? std::log1p(-params.alpha) : kNegInf;
  const double w0 = la + lp0[summary.ones];
  const double w1 = l1a + lp1[summary.ones];
  if (w0 == kNegInf && w1 == kNegInf) {
    throw std::domain_error("cluster_posterior: observation impossible under both clusters");
  }
  const double norm = log_sum_exp(w0, w1);
  return {std::exp(w0 - norm), std::exp(w1 - norm)};
}

RevealCountPmf reveal_count_pmf(const MixtureParams& params, int k) {
  if (k < 0 || k > params.n) throw std::invalid_argument("reveal_count_pmf: k out of [0, n]");
  RevealCountPmf out;
  out.cluster0 = binomial_pmf(k, params.p);
  out.cluster1 = binomial_pmf(k, 1.0 - params.p);
  out.marginal.resize(k + 1);
  for (int a = 0; a <= k; ++a) {
    out.marginal[a] = params.alpha * out.cluster0[a] + (1.0 - params.alpha) * out.cluster1[a];
  }
  return out;
}

}  // namespace elicit
