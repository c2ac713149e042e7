#pragma once

#include <span>
#include <vector>

#include "elicit/welfare.hpp"

namespace elicit {

/// Lemma-1-style all-or-nothing response: side with the posterior-favored
/// cluster for every a; exact posterior ties go to cluster 0 (all 0s).
PolicyTable optimal_response_utilitarian(const MixtureParams& params, int k);

/// Welfare-optimal response for finite gamma: each f(a) independently
/// maximizes the sign-adjusted weighted response value; ties toward smaller
/// f(a). Throws on infinite gamma (use maximin_response).
PolicyTable optimal_response_general(const MixtureParams& params, int k, const WelfareSpec& spec);

/// Maximin-limit response. Interior p uses the closed-form stationary point
///   s(a) = (n - 2a + log_r((1-alpha)/alpha)) / 2,   r = p / (1-p),
/// picking the better of clamp(floor(s)) and clamp(ceil(s)); for k > n/2 the
/// objective is scanned exhaustively instead. Boundaries: p = 0 falls back to
/// the utilitarian policy (queries identify the cluster exactly) and p = 0.5
/// returns f(a) = round((n-k)/2) for every a (halves round up).
PolicyTable maximin_response(const MixtureParams& params, int k);

/// Dispatches on spec.gamma: finite -> general, infinite -> maximin.
PolicyTable optimal_response(const MixtureParams& params, int k, const WelfareSpec& spec);

struct KEvaluation {
  PolicyTable policy;
  double objective;  // welfare value at this k
  double order_key;  // underflow-safe comparison key
};

struct OptimizationResult {
  int best_k = 0;
  PolicyTable policy;
  double objective = 0.0;
  std::vector<KEvaluation> per_k;  // index = k, covers 0..k_max
};

/// Evaluates the optimal policy and welfare for every k in [0, k_max]
/// (k_max < 0 means n) and returns the argmax; ties toward smaller k.
OptimizationResult optimal_query_count(const MixtureParams& params, const WelfareSpec& spec,
                                       int k_max = -1);

struct RegimeMap {
  std::vector<double> p_grid;
  std::vector<double> alpha_grid;
  std::vector<std::vector<int>> best_k;  // best_k[i][j] at (p_grid[i], alpha_grid[j])
};

RegimeMap regime_map(int n, std::span<const double> p_grid, std::span<const double> alpha_grid,
                     const WelfareSpec& spec, int threads = 1);

}  // namespace elicit
