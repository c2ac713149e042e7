#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace elicit {

/// Neumaier-compensated accumulator. Order-sensitive like any float sum,
/// but the running error stays O(eps) instead of O(n*eps).
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// log of C(n, k) via lgamma; requires 0 <= k <= n.
double log_binomial(int n, int k);

/// pmf of Binomial(count, q) over {0, ..., count}. Boundary q in {0, 1}
/// returns an exact point mass (0^0 = 1 convention).
std::vector<double> binomial_pmf(int count, double q);

/// Same support as binomial_pmf but log-probabilities; zero-probability
/// entries are -infinity.
std::vector<double> binomial_log_pmf(int count, double q);

double log_sum_exp(double a, double b);
double log_sum_exp(std::span<const double> xs);

/// Uniform double in [0, 1) from 53 random bits.
double canonical_uniform(std::uint64_t random_bits);

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace elicit
