#include "elicit/welfare.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "elicit/numeric.hpp"

namespace elicit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ErrorRates {
  double zero_guess;  // probability a guessed 0 disagrees with the user
  double one_guess;   // probability a guessed 1 disagrees with the user
};

ErrorRates error_rates(double p, int cluster) {
  // Cluster 0 bits are 1 with probability p, so a guessed 0 errs with p and a
  // guessed 1 with 1-p; swapped for cluster 1.
  if (cluster != 0 && cluster != 1) throw std::invalid_argument("cluster must be 0 or 1");
  return cluster == 0 ? ErrorRates{p, 1.0 - p} : ErrorRates{1.0 - p, p};
}

// Linear-space response value; valid for any finite gamma (gamma = 1 yields
// the Nash log-sum through welfare_weight).
double g_linear(const MixtureParams& params, int k, int z, const WelfareSpec& spec, int cluster) {
  const auto pmf = mistake_count_pmf(params, k, z, cluster);
  CompensatedSum sum;
  for (int m = 0; m < static_cast<int>(pmf.size()); ++m) {
    if (pmf[m] == 0.0) continue;
    const double u = params.n - spec.query_cost * k - m;
    const double w = welfare_weight(u, spec.gamma, spec.zero_shift);
    if (std::isinf(w)) return w;
    sum.add(pmf[m] * w);
  }
  return sum.value();
}

// log of the gamma > 1 response value sum(pmf * base^(1-gamma)); +infinity
// when a zero base carries positive probability (zero_shift off).
double g_log(const MixtureParams& params, int k, int z, const WelfareSpec& spec, int cluster) {
  const auto pmf = mistake_count_pmf(params, k, z, cluster);
  std::vector<double> terms;
  terms.reserve(pmf.size());
  for (int m = 0; m < static_cast<int>(pmf.size()); ++m) {
    if (pmf[m] == 0.0) continue;
    const double u = params.n - spec.query_cost * k - m;
    if (u < 0.0) throw std::domain_error("welfare: negative utility undefined for gamma > 0");
    const double base = spec.zero_shift ? u + 1.0 : u;
    if (base == 0.0) return kInf;
    terms.push_back(std::log(pmf[m]) + (1.0 - spec.gamma) * std::log(base));
  }
  return log_sum_exp(terms);
}

}  // namespace

WelfareSpec::WelfareSpec(double gamma_, double query_cost_, bool zero_shift_)
    : gamma(gamma_), query_cost(query_cost_), zero_shift(zero_shift_) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("WelfareSpec: gamma must be >= 0");
  if (!(query_cost >= 0.0)) throw std::invalid_argument("WelfareSpec: query_cost must be >= 0");
}

WelfareSpec WelfareSpec::maximin_limit(double query_cost) {
  return WelfareSpec(kInf, query_cost, true);
}

void PolicyTable::validate(int n) const {
  if (k < 0 || k > n) throw std::invalid_argument("PolicyTable: k out of [0, n]");
  if (static_cast<int>(zeros_for.size()) != k + 1) {
    throw std::invalid_argument("PolicyTable: table must have an entry for every a in [0, k]");
  }
  for (int z : zeros_for) {
    if (z < 0 || z > n - k) throw std::invalid_argument("PolicyTable: entry out of [0, n-k]");
  }
}

double utility(int n, int k, int mistakes, const WelfareSpec& spec) {
  if (mistakes < 0 || mistakes > n - k) {
    throw std::invalid_argument("utility: mistakes out of [0, n-k]");
  }
  return n - spec.query_cost * k - mistakes;
}

double expected_mistakes_conditional(const MixtureParams& params, const PolicyTable& policy,
                                     int cluster, int a) {
  policy.validate(params.n);
  if (a < 0 || a > policy.k) throw std::invalid_argument("a out of [0, k]");
  const auto rates = error_rates(params.p, cluster);
  const int zeros = policy.zeros(a);
  const int ones = params.n - policy.k - zeros;
  return zeros * rates.zero_guess + ones * rates.one_guess;
}

double expected_utility(const MixtureParams& params, const PolicyTable& policy,
                        const WelfareSpec& spec) {
  policy.validate(params.n);
  const auto counts = reveal_count_pmf(params, policy.k);
  CompensatedSum mistakes;
  for (int a = 0; a <= policy.k; ++a) {
    mistakes.add(params.alpha * counts.cluster0[a] *
                 expected_mistakes_conditional(params, policy, 0, a));
    mistakes.add((1.0 - params.alpha) * counts.cluster1[a] *
                 expected_mistakes_conditional(params, policy, 1, a));
  }
  return params.n - spec.query_cost * policy.k - mistakes.value();
}

std::vector<double> mistake_count_pmf(const MixtureParams& params, int k, int z, int cluster) {
  if (k < 0 || k > params.n) throw std::invalid_argument("mistake_count_pmf: k out of [0, n]");
  if (z < 0 || z > params.n - k) {
    throw std::invalid_argument("mistake_count_pmf: z out of [0, n-k]");
  }
  const auto rates = error_rates(params.p, cluster);
  const auto zero_errors = binomial_pmf(z, rates.zero_guess);
  const auto one_errors = binomial_pmf(params.n - k - z, rates.one_guess);
  std::vector<double> pmf(params.n - k + 1, 0.0);
  for (std::size_t j = 0; j < zero_errors.size(); ++j) {
    if (zero_errors[j] == 0.0) continue;
    for (std::size_t l = 0; l < one_errors.size(); ++l) {
      pmf[j + l] += zero_errors[j] * one_errors[l];
    }
  }
  return pmf;
}

double welfare_weight(double u, double gamma, bool zero_shift) {
  if (gamma == 0.0) return u;
  if (u < 0.0) throw std::domain_error("welfare: negative utility undefined for gamma > 0");
  if (gamma < 1.0) return std::pow(u, 1.0 - gamma);
  const double base = zero_shift ? u + 1.0 : u;
  if (gamma == 1.0) return base == 0.0 ? -kInf : std::log(base);
  return base == 0.0 ? kInf : std::pow(base, 1.0 - gamma);
}

double g_term(const MixtureParams& params, int k, int z, const WelfareSpec& spec, int cluster) {
  if (spec.gamma == 1.0 || spec.maximin()) {
    throw std::invalid_argument("g_term: gamma = 1 and maximin have dedicated limit forms");
  }
  return g_linear(params, k, z, spec, cluster);
}

ResponseValueTable response_value_table(const MixtureParams& params, int k,
                                        const WelfareSpec& spec) {
  if (spec.maximin()) {
    throw std::invalid_argument("response_value_table: finite gamma required");
  }
  if (k < 0 || k > params.n) throw std::invalid_argument("response_value_table: k out of [0, n]");
  ResponseValueTable table;
  table.log_domain = spec.gamma > 1.0;
  const int zmax = params.n - k;
  table.g0.resize(zmax + 1);
  table.g1.resize(zmax + 1);
  for (int z = 0; z <= zmax; ++z) {
    if (table.log_domain) {
      table.g0[z] = g_log(params, k, z, spec, 0);
      table.g1[z] = g_log(params, k, z, spec, 1);
    } else {
      table.g0[z] = g_linear(params, k, z, spec, 0);
      table.g1[z] = g_linear(params, k, z, spec, 1);
    }
  }
  return table;
}

double worst_case_mass(const MixtureParams& params, const PolicyTable& policy) {
  policy.validate(params.n);
  const int k = policy.k;
  const auto counts = reveal_count_pmf(params, k);
  CompensatedSum mass;
  for (int a = 0; a <= k; ++a) {
    const int zeros = policy.zeros(a);
    const int ones = params.n - k - zeros;
    // all guesses wrong at once: every guessed 0 hit a flipped bit, every
    // guessed 1 an unflipped one (cluster 0; mirrored for cluster 1)
    mass.add(params.alpha * counts.cluster0[a] * std::pow(params.p, zeros) *
             std::pow(1.0 - params.p, ones));
    mass.add((1.0 - params.alpha) * counts.cluster1[a] * std::pow(1.0 - params.p, zeros) *
             std::pow(params.p, ones));
  }
  return mass.value();
}

OrderedWelfare welfare_ordered(const MixtureParams& params, const PolicyTable& policy,
                               const WelfareSpec& spec) {
  policy.validate(params.n);
  if (spec.maximin()) {
    const double v = -worst_case_mass(params, policy);
    return {v, v};
  }
  const int k = policy.k;
  const auto counts = reveal_count_pmf(params, k);
  const double a0 = params.alpha;
  const double a1 = 1.0 - params.alpha;

  if (spec.gamma > 1.0) {
    std::vector<double> terms;
    terms.reserve(2 * (k + 1));
    for (int a = 0; a <= k; ++a) {
      const int z = policy.zeros(a);
      const double w0 = a0 * counts.cluster0[a];
      const double w1 = a1 * counts.cluster1[a];
      if (w0 > 0.0) terms.push_back(std::log(w0) + g_log(params, k, z, spec, 0));
      if (w1 > 0.0) terms.push_back(std::log(w1) + g_log(params, k, z, spec, 1));
    }
    const double log_sum = log_sum_exp(terms);
    // W = S / (1 - gamma) = -S / (gamma - 1); larger W means smaller S.
    const double value = -std::exp(log_sum) / (spec.gamma - 1.0);
    return {value, -log_sum};
  }

  CompensatedSum sum;
  for (int a = 0; a <= k; ++a) {
    const int z = policy.zeros(a);
    const double w0 = a0 * counts.cluster0[a];
    const double w1 = a1 * counts.cluster1[a];
    if (w0 > 0.0) sum.add(w0 * g_linear(params, k, z, spec, 0));
    if (w1 > 0.0) sum.add(w1 * g_linear(params, k, z, spec, 1));
  }
  const double s = sum.value();
  if (spec.gamma == 1.0) {
    if (!spec.zero_shift && s == -kInf) {
      throw std::invalid_argument(
          "welfare: gamma = 1 with zero-utility outcomes of positive probability; "
          "enable zero_shift");
    }
    return {s, s};
  }
  const double value = s / (1.0 - spec.gamma);
  return {value, value};
}

double welfare(const MixtureParams& params, const PolicyTable& policy, const WelfareSpec& spec) {
  return welfare_ordered(params, policy, spec).value;
}

}  // namespace elicit
