#pragma once

#include <cmath>
#include <vector>

#include "elicit/mixture.hpp"

namespace elicit {

/// Settings for the single-parameter welfare family
///   W = 1/(1-gamma) * E[u^(1-gamma)].
/// gamma = 0 is utilitarian, gamma = 1 the Nash (log) limit, +infinity the
/// maximin limit. With zero_shift set (the default), utilities enter the sum
/// as u + 1 whenever gamma >= 1, which keeps the family defined at u = 0; for
/// gamma < 1 the raw utility is always used.
struct WelfareSpec {
  double gamma = 0.0;
  double query_cost = 1.0;
  bool zero_shift = true;

  WelfareSpec() = default;
  explicit WelfareSpec(double gamma_, double query_cost_ = 1.0, bool zero_shift_ = true);

  bool maximin() const { return std::isinf(gamma); }
  static WelfareSpec maximin_limit(double query_cost = 1.0);
};

/// Deterministic response table for a fixed query count k: zeros_for[a] is
/// the number of 0s output among the n-k unrevealed features after observing
/// a revealed 1s. The remaining n-k-zeros_for[a] unrevealed features are 1s.
struct PolicyTable {
  int k = 0;
  std::vector<int> zeros_for;  // size k+1, each entry in [0, n-k]

  int zeros(int a) const { return zeros_for.at(static_cast<std::size_t>(a)); }
  /// Throws std::invalid_argument unless the table is well-formed for n.
  void validate(int n) const;
};

/// Realized utility n - c*k - mistakes. Throws when mistakes is outside
/// [0, n-k].
double utility(int n, int k, int mistakes, const WelfareSpec& spec);

/// E[mistakes | cluster, a revealed 1s] under the policy: each guessed 0 is
/// wrong with probability p for cluster 0 (1-p for cluster 1) and each
/// guessed 1 with the complementary rate.
double expected_mistakes_conditional(const MixtureParams& params, const PolicyTable& policy,
                                     int cluster, int a);

/// Closed-form expected utility n - c*k - E[mistakes], marginalized over the
/// cluster prior and the revealed-count distribution.
double expected_utility(const MixtureParams& params, const PolicyTable& policy,
                        const WelfareSpec& spec);

/// pmf over the total mistake count when z of the n-k unrevealed features are
/// guessed 0, conditional on the cluster: the convolution of the two
/// per-guess-type binomial error counts.
std::vector<double> mistake_count_pmf(const MixtureParams& params, int k, int z, int cluster);

/// The pointwise welfare weight applied to a realized utility u:
///   gamma = 0   -> u
///   gamma < 1   -> u^(1-gamma)
///   gamma = 1   -> log(u + 1) with zero_shift, log(u) without
///   gamma > 1   -> (u + 1)^(1-gamma) with zero_shift, u^(1-gamma) without
///                  (u = 0 without the shift yields +infinity)
/// Negative utilities are rejected for gamma > 0, where the family is not
/// defined.
double welfare_weight(double u, double gamma, bool zero_shift);

/// Cluster-conditional response value for guessing z zeros:
///   sum over mistake counts m of P(m | cluster, z) * welfare_weight(u(m)).
/// Defined for finite gamma != 1; the gamma = 1 and maximin limits have
/// dedicated forms.
double g_term(const MixtureParams& params, int k, int z, const WelfareSpec& spec, int cluster);

/// Tables of response values for every z in [0, n-k], in the representation
/// the optimizer needs: linear values for gamma <= 1 (maximize), log-space
/// sums for gamma > 1 (minimize; immune to underflow at extreme gamma).
struct ResponseValueTable {
  std::vector<double> g0;
  std::vector<double> g1;
  bool log_domain = false;  // true iff gamma > 1
};
ResponseValueTable response_value_table(const MixtureParams& params, int k,
                                        const WelfareSpec& spec);

/// Probability that every unrevealed guess is wrong (the worst outcome). The
/// maximin welfare objective is the negation of this mass.
double worst_case_mass(const MixtureParams& params, const PolicyTable& policy);

/// Welfare value together with an ordering key that stays meaningful when the
/// raw value underflows at large gamma. Larger key = better.
struct OrderedWelfare {
  double value;
  double order_key;
};
OrderedWelfare welfare_ordered(const MixtureParams& params, const PolicyTable& policy,
                               const WelfareSpec& spec);

/// W(k, gamma) for the given policy. gamma = 0 coincides with
/// expected_utility (computed through the general response-value sums, so the
/// two paths cross-check each other); gamma = 1 uses the Nash log form;
/// infinite gamma returns -worst_case_mass.
double welfare(const MixtureParams& params, const PolicyTable& policy, const WelfareSpec& spec);

}  // namespace elicit
