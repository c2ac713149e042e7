#include "elicit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "elicit/numeric.hpp"
#include "elicit/parallel.hpp"

namespace elicit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-a maximin objective for guessing z zeros: the probability mass of the
// worst outcome, up to the positive factor C(k, a).
double maximin_cell(const MixtureParams& params, int a, int z) {
  const double p = params.p;
  return params.alpha * std::pow(p, a + z) * std::pow(1.0 - p, params.n - a - z) +
         (1.0 - params.alpha) * std::pow(1.0 - p, a + z) * std::pow(p, params.n - a - z);
}

int maximin_scan(const MixtureParams& params, int a, int zmax) {
  int best = 0;
  double best_val = maximin_cell(params, a, 0);
  for (int z = 1; z <= zmax; ++z) {
    const double v = maximin_cell(params, a, z);
    if (v < best_val) {
      best_val = v;
      best = z;
    }
  }
  return best;
}

}  // namespace

PolicyTable optimal_response_utilitarian(const MixtureParams& params, int k) {
  if (k < 0 || k > params.n) throw std::invalid_argument("optimal_response: k out of [0, n]");
  const auto counts = reveal_count_pmf(params, k);
  PolicyTable table;
  table.k = k;
  table.zeros_for.resize(k + 1);
  for (int a = 0; a <= k; ++a) {
    const double w0 = params.alpha * counts.cluster0[a];
    const double w1 = (1.0 - params.alpha) * counts.cluster1[a];
    table.zeros_for[a] = w0 >= w1 ? params.n - k : 0;
  }
  return table;
}

PolicyTable optimal_response_general(const MixtureParams& params, int k,
                                     const WelfareSpec& spec) {
  if (spec.maximin()) {
    throw std::invalid_argument("optimal_response_general: finite gamma required");
  }
  if (k < 0 || k > params.n) throw std::invalid_argument("optimal_response: k out of [0, n]");
  const auto values = response_value_table(params, k, spec);
  const auto counts = reveal_count_pmf(params, k);
  const int zmax = params.n - k;

  PolicyTable table;
  table.k = k;
  table.zeros_for.resize(k + 1);
  for (int a = 0; a <= k; ++a) {
    const double w0 = params.alpha * counts.cluster0[a];
    const double w1 = (1.0 - params.alpha) * counts.cluster1[a];
    int best = 0;
    if (values.log_domain) {
      // gamma > 1: minimize the weighted sum, compared in log space
      const double lw0 = w0 > 0.0 ? std::log(w0) : kNegInf;
      const double lw1 = w1 > 0.0 ? std::log(w1) : kNegInf;
      double best_val = log_sum_exp(lw0 + values.g0[0], lw1 + values.g1[0]);
      for (int z = 1; z <= zmax; ++z) {
        const double v = log_sum_exp(lw0 + values.g0[z], lw1 + values.g1[z]);
        if (v < best_val) {
          best_val = v;
          best = z;
        }
      }
    } else {
      // gamma <= 1: maximize the weighted sum directly
      auto key = [&](int z) {
        double v = 0.0;
        if (w0 > 0.0) v += w0 * values.g0[z];
        if (w1 > 0.0) v += w1 * values.g1[z];
        return v;
      };
      double best_val = key(0);
      for (int z = 1; z <= zmax; ++z) {
        const double v = key(z);
        if (v > best_val) {
          best_val = v;
          best = z;
        }
      }
    }
    table.zeros_for[a] = best;
  }
  return table;
}

PolicyTable maximin_response(const MixtureParams& params, int k) {
  if (k < 0 || k > params.n) throw std::invalid_argument("maximin_response: k out of [0, n]");
  if (params.p == 0.0) return optimal_response_utilitarian(params, k);

  const int zmax = params.n - k;
  PolicyTable table;
  table.k = k;
  table.zeros_for.resize(k + 1);

  if (params.p == 0.5) {
    // every z is a stationary point of the objective; split the guesses
    const int split = static_cast<int>(std::llround(zmax / 2.0));
    std::fill(table.zeros_for.begin(), table.zeros_for.end(), split);
    return table;
  }

  const bool use_closed_form = 2 * k <= params.n;
  const double log_r = std::log(params.p) - std::log1p(-params.p);  // log(p/(1-p)) < 0
  const double prior_shift = std::log((1.0 - params.alpha) / params.alpha) / log_r;
  for (int a = 0; a <= k; ++a) {
    if (!use_closed_form) {
      table.zeros_for[a] = maximin_scan(params, a, zmax);
      continue;
    }
    const double s = 0.5 * (params.n - 2.0 * a + prior_shift);
    const int lo = static_cast<int>(std::clamp(std::floor(s), 0.0, static_cast<double>(zmax)));
    const int hi = static_cast<int>(std::clamp(std::ceil(s), 0.0, static_cast<double>(zmax)));
    if (lo == hi) {
      table.zeros_for[a] = lo;
    } else {
      const double g_lo = maximin_cell(params, a, lo);
      const double g_hi = maximin_cell(params, a, hi);
      table.zeros_for[a] = g_hi < g_lo ? hi : lo;  // ties go to the smaller f
    }
  }
  return table;
}

PolicyTable optimal_response(const MixtureParams& params, int k, const WelfareSpec& spec) {
  return spec.maximin() ? maximin_response(params, k) : optimal_response_general(params, k, spec);
}

OptimizationResult optimal_query_count(const MixtureParams& params, const WelfareSpec& spec,
                                       int k_max) {
  if (k_max < 0) k_max = params.n;
  if (k_max > params.n) throw std::invalid_argument("optimal_query_count: k_max exceeds n");

  OptimizationResult result;
  result.per_k.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    PolicyTable policy = optimal_response(params, k, spec);
    const OrderedWelfare ow = welfare_ordered(params, policy, spec);
    result.per_k.push_back({std::move(policy), ow.value, ow.order_key});
    if (k == 0 || ow.order_key > result.per_k[result.best_k].order_key) {
      result.best_k = k;
    }
  }
  result.policy = result.per_k[result.best_k].policy;
  result.objective = result.per_k[result.best_k].objective;
  return result;
}

RegimeMap regime_map(int n, std::span<const double> p_grid, std::span<const double> alpha_grid,
                     const WelfareSpec& spec, int threads) {
  if (p_grid.empty() || alpha_grid.empty()) {
    throw std::invalid_argument("regime_map: grids must be non-empty");
  }
  RegimeMap map;
  map.p_grid.assign(p_grid.begin(), p_grid.end());
  map.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  map.best_k.assign(p_grid.size(), std::vector<int>(alpha_grid.size(), 0));

  const std::size_t cells = p_grid.size() * alpha_grid.size();
  parallel_for(cells, threads, [&](std::size_t cell) {
    const std::size_t i = cell / alpha_grid.size();
    const std::size_t j = cell % alpha_grid.size();
    const MixtureParams cell_params(n, map.p_grid[i], map.alpha_grid[j]);
    map.best_k[i][j] = optimal_query_count(cell_params, spec).best_k;
  });
  return map;
}

}  // namespace elicit
