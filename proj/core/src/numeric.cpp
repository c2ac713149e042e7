#include "elicit/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace elicit {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (!std::isfinite(t)) {  // infinities are sticky; compensation is meaningless
    sum_ = t;
    compensation_ = 0.0;
    return;
  }
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("log_binomial: k out of [0, n]");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::vector<double> binomial_pmf(int count, double q) {
  if (count < 0) throw std::invalid_argument("binomial_pmf: negative count");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("binomial_pmf: q out of [0, 1]");
  std::vector<double> pmf(count + 1, 0.0);
  if (count == 0 || q == 0.0) {
    pmf[0] = 1.0;
    if (count > 0 && q == 1.0) std::swap(pmf[0], pmf[count]);
    return pmf;
  }
  if (q == 1.0) {
    pmf[count] = 1.0;
    return pmf;
  }
  const double lq = std::log(q);
  const double l1q = std::log1p(-q);
  for (int i = 0; i <= count; ++i) {
    pmf[i] = std::exp(log_binomial(count, i) + i * lq + (count - i) * l1q);
  }
  return pmf;
}

std::vector<double> binomial_log_pmf(int count, double q) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (count < 0) throw std::invalid_argument("binomial_log_pmf: negative count");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("binomial_log_pmf: q out of [0, 1]");
  std::vector<double> lp(count + 1, kNegInf);
  if (count == 0) {
    lp[0] = 0.0;
    return lp;
  }
  if (q == 0.0) {
    lp[0] = 0.0;
    return lp;
  }
  if (q == 1.0) {
    lp[count] = 0.0;
    return lp;
  }
  const double lq = std::log(q);
  const double l1q = std::log1p(-q);
  for (int i = 0; i <= count; ++i) {
    lp[i] = log_binomial(count, i) + i * lq + (count - i) * l1q;
  }
  return lp;
}

double log_sum_exp(double a, double b) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  if (std::isinf(m)) return m;  // +inf dominates
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_sum_exp(std::span<const double> xs) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  double m = kNegInf;
  for (double x : xs) m = x > m ? x : m;
  if (m == kNegInf || std::isinf(m)) return m;
  CompensatedSum s;
  for (double x : xs) {
    if (x != kNegInf) s.add(std::exp(x - m));
  }
  return m + std::log(s.value());
}

double canonical_uniform(std::uint64_t random_bits) {
  return static_cast<double>(random_bits >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace elicit
