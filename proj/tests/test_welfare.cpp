#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "elicit/numeric.hpp"
#include "elicit/welfare.hpp"
#include "test_support.hpp"

using namespace elicit;

namespace {

PolicyTable constant_policy(int k, int z) {
  PolicyTable t;
  t.k = k;
  t.zeros_for.assign(k + 1, z);
  return t;
}

}  // namespace

TEST_CASE("utility formula and range checks") {
  CHECK(utility(10, 0, 0, WelfareSpec(0.0)) == 10.0);
  CHECK(utility(10, 4, 2, WelfareSpec(0.0)) == 4.0);
  CHECK(utility(10, 4, 2, WelfareSpec(0.0, 0.3)) == doctest::Approx(6.8).epsilon(1e-12));
  CHECK_THROWS_AS(utility(10, 4, 7, WelfareSpec(0.0)), std::invalid_argument);
  CHECK_THROWS_AS(utility(10, 4, -1, WelfareSpec(0.0)), std::invalid_argument);
}

TEST_CASE("WelfareSpec validation") {
  CHECK_THROWS_AS(WelfareSpec(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(WelfareSpec(1.0, -0.5), std::invalid_argument);
  CHECK(WelfareSpec::maximin_limit().maximin());
  CHECK_FALSE(WelfareSpec(100.0).maximin());
}

TEST_CASE("expected_mistakes_conditional hand cases") {
  // all-zero guess on a noiseless cluster-0 user
  CHECK(expected_mistakes_conditional(MixtureParams(5, 0.0, 0.5), constant_policy(1, 4), 0, 0) ==
        0.0);
  // every guess is a coin flip
  CHECK(expected_mistakes_conditional(MixtureParams(8, 0.5, 0.5), constant_policy(2, 3), 0, 1) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(expected_mistakes_conditional(MixtureParams(8, 0.5, 0.5), constant_policy(2, 5), 1, 2) ==
        doctest::Approx(3.0).epsilon(1e-12));
  // n=10, k=2, p=0.1, cluster 0, f(a)=8 -> 8*0.1 + 0*0.9
  CHECK(expected_mistakes_conditional(MixtureParams(10, 0.1, 0.5), constant_policy(2, 8), 0, 0) ==
        doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("expected_utility hand cases") {
  const WelfareSpec spec(0.0);
  // one noiseless query identifies the cluster: follow the revealed bit
  PolicyTable follow;
  follow.k = 1;
  follow.zeros_for = {2, 0};
  CHECK(expected_utility(MixtureParams(3, 0.0, 0.5), follow, spec) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // coin-flip bits, no queries: any fixed guess loses half the bits
  CHECK(expected_utility(MixtureParams(3, 0.5, 0.5), constant_policy(0, 3), spec) ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK(expected_utility(MixtureParams(3, 0.5, 0.5), constant_policy(0, 0), spec) ==
        doctest::Approx(1.5).epsilon(1e-12));
  // k=1 at p=0.5: every policy earns 3 - 1 - 1
  test::InstanceGen gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto policy = gen.random_policy(3, 1);
    CHECK(expected_utility(MixtureParams(3, 0.5, 0.5), policy, spec) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("g_term at gamma = 0 collapses to the linear form") {
  test::InstanceGen gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto params = gen.params();
    const int k = gen.uniform_int(0, params.n - 1);
    const int z = gen.uniform_int(0, params.n - k);
    const WelfareSpec spec(0.0, gen.uniform(0.0, 1.0));
    for (int cluster = 0; cluster <= 1; ++cluster) {
      const double linear =
          params.n - spec.query_cost * k -
          expected_mistakes_conditional(params, constant_policy(k, z), cluster, 0);
      CHECK(g_term(params, k, z, spec, cluster) == doctest::Approx(linear).epsilon(1e-9));
    }
  }
}

TEST_CASE("g_term: certain zero mistakes reduce to a single power") {
  // n-k=2, z=2, p=0, cluster 0, gamma=0.5, c=1, k=0: no mistakes can happen
  const MixtureParams params(2, 0.0, 0.5);
  CHECK(g_term(params, 0, 2, WelfareSpec(0.5), 0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("g_term against a brute-force outcome enumeration") {
  // n=4, k=1, z=2, p=0.2, gamma=2, c=1, zero_shift on
  const MixtureParams params(4, 0.2, 0.5);
  const int k = 1, z = 2;
  const int guessed_ones = params.n - k - z;
  const WelfareSpec spec(2.0);
  for (int cluster = 0; cluster <= 1; ++cluster) {
    const double p_err_zero = cluster == 0 ? params.p : 1.0 - params.p;
    const double p_err_one = cluster == 0 ? 1.0 - params.p : params.p;
    double expected = 0.0;
    for (int j = 0; j <= z; ++j) {
      for (int l = 0; l <= guessed_ones; ++l) {
        const double prob = test::binom_coeff(z, j) * std::pow(p_err_zero, j) *
                            std::pow(1.0 - p_err_zero, z - j) *
                            test::binom_coeff(guessed_ones, l) * std::pow(p_err_one, l) *
                            std::pow(1.0 - p_err_one, guessed_ones - l);
        const double u = params.n - 1.0 * k - (j + l);
        expected += prob * std::pow(u + 1.0, 1.0 - spec.gamma);
      }
    }
    CHECK(g_term(params, k, z, spec, cluster) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("g_term refuses the limit cases") {
  const MixtureParams params(4, 0.2, 0.5);
  CHECK_THROWS_AS(g_term(params, 1, 1, WelfareSpec(1.0), 0), std::invalid_argument);
  CHECK_THROWS_AS(g_term(params, 1, 1, WelfareSpec::maximin_limit(), 0), std::invalid_argument);
}

TEST_CASE("welfare at gamma = 0 equals expected utility") {
  test::InstanceGen gen(29);
  for (int trial = 0; trial < 50; ++trial) {
    const auto params = gen.params();
    const int k = gen.uniform_int(0, params.n);
    const auto policy = gen.random_policy(params.n, k);
    const WelfareSpec spec(0.0, gen.uniform(0.0, 1.5));
    CHECK(welfare(params, policy, spec) ==
          doctest::Approx(expected_utility(params, policy, spec)).epsilon(1e-9));
  }
}

TEST_CASE("welfare: deterministic single-outcome case") {
  // (n=3, p=0, alpha=0.5, gamma=2, zero_shift on), k=1, follow-the-bit:
  // utility 2 with certainty, so W = (1/(1-2)) * (2+1)^(-1)
  PolicyTable follow;
  follow.k = 1;
  follow.zeros_for = {2, 0};
  CHECK(welfare(MixtureParams(3, 0.0, 0.5), follow, WelfareSpec(2.0)) ==
        doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("welfare at gamma = 1 needs the shift when zero utility is possible") {
  const MixtureParams params(2, 0.3, 0.5);
  const auto policy = constant_policy(0, 1);
  CHECK_THROWS_AS(welfare(params, policy, WelfareSpec(1.0, 1.0, false)), std::invalid_argument);
  CHECK(std::isfinite(welfare(params, policy, WelfareSpec(1.0, 1.0, true))));
}

TEST_CASE("expected_utility is invariant under the complement transformation") {
  test::InstanceGen gen(37);
  for (int trial = 0; trial < 50; ++trial) {
    const auto params = gen.params();
    const int k = gen.uniform_int(0, params.n);
    const auto policy = gen.random_policy(params.n, k);
    const MixtureParams flipped(params.n, params.p, 1.0 - params.alpha);
    PolicyTable mirrored;
    mirrored.k = k;
    mirrored.zeros_for.resize(k + 1);
    for (int a = 0; a <= k; ++a) {
      mirrored.zeros_for[a] = (params.n - k) - policy.zeros(k - a);
    }
    const WelfareSpec spec(0.0);
    CHECK(expected_utility(flipped, mirrored, spec) ==
          doctest::Approx(expected_utility(params, policy, spec)).epsilon(1e-12));
  }
}

TEST_CASE("expected utility is non-increasing in noise at k = 0") {
  // alpha = 0.5, gamma = 0: the optimal guess at k=0 earns n(1-p)
  const int n = 6;
  double previous = static_cast<double>(n) + 1.0;
  for (int i = 0; i <= 20; ++i) {
    const double p = 0.5 * i / 20.0;
    const MixtureParams params(n, p, 0.5);
    const auto value = expected_utility(params, constant_policy(0, n), WelfareSpec(0.0));
    CHECK(value <= previous + 1e-12);
    previous = value;
  }
}

TEST_CASE("mistake_count_pmf is a distribution concentrated on [0, n-k]") {
  test::InstanceGen gen(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto params = gen.params(2, 14, 0.0, 0.5, 0.0, 1.0);
    const int k = gen.uniform_int(0, params.n - 1);
    const int z = gen.uniform_int(0, params.n - k);
    for (int cluster = 0; cluster <= 1; ++cluster) {
      const auto pmf = mistake_count_pmf(params, k, z, cluster);
      REQUIRE(static_cast<int>(pmf.size()) == params.n - k + 1);
      CompensatedSum total;
      for (double v : pmf) {
        CHECK(v >= 0.0);
        total.add(v);
      }
      CHECK(std::abs(total.value() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("welfare_ordered keeps a usable ordering at extreme gamma") {
  const MixtureParams params(12, 0.15, 0.5);
  const WelfareSpec spec(200.0);
  const auto a = welfare_ordered(params, constant_policy(2, 5), spec);
  const auto b = welfare_ordered(params, constant_policy(2, 10), spec);
  CHECK(std::isfinite(a.order_key));
  CHECK(std::isfinite(b.order_key));
  CHECK(a.order_key != b.order_key);
}
