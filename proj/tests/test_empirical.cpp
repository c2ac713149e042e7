#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "elicit/empirical.hpp"
#include "elicit/errors.hpp"

using namespace elicit;

namespace {

BinaryDataset make_dataset(std::vector<std::vector<std::uint8_t>> rows) {
  BinaryDataset data;
  data.n = static_cast<int>(rows.front().size());
  data.rows = std::move(rows);
  return data;
}

}  // namespace

TEST_CASE("load_rankings parses the generic format") {
  std::istringstream in("2 0 1\n0 1 2\n");
  const auto data = load_rankings(in, {});
  REQUIRE(data.n == 3);
  REQUIRE(data.user_count() == 2);
  CHECK(data.rankings[0] == std::vector<int>{2, 0, 1});
  CHECK(data.rankings[1] == std::vector<int>{0, 1, 2});
}

TEST_CASE("load_rankings reports the offending line") {
  const auto line_of_failure = [](const std::string& text) {
    std::istringstream in(text);
    try {
      load_rankings(in, {});
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string{};
  };
  CHECK(line_of_failure("0 1 2\n2 2 0\n").find("line 2") != std::string::npos);
  CHECK(line_of_failure("0 1 2\n0 1\n").find("line 2") != std::string::npos);

  std::istringstream range("0 1 3\n");
  CHECK_THROWS_AS(load_rankings(range, {}), DataError);

  std::istringstream junk("0 x 2\n");
  CHECK_THROWS_AS(load_rankings(junk, {}), DataError);

  std::istringstream empty("\n\n");
  CHECK_THROWS_AS(load_rankings(empty, {}), DataError);
}

TEST_CASE("load_rankings honors metadata columns and the sushi preset") {
  std::istringstream generic("7 9 2 0 1\n");
  RankingReadOptions options;
  options.metadata_columns = 2;
  const auto data = load_rankings(generic, options);
  CHECK(data.rankings[0] == std::vector<int>{2, 0, 1});

  // published order-file layout: count header, then "0 <len> items..."
  std::istringstream sushi("3 4\n0 4 2 0 1 3\n0 4 3 1 0 2\n0 4 0 1 2 3\n");
  RankingReadOptions preset;
  preset.format = RankingFormat::kSushiOrder;
  const auto sushi_data = load_rankings(sushi, preset);
  CHECK(sushi_data.n == 4);
  CHECK(sushi_data.user_count() == 3);
  CHECK(sushi_data.rankings[0] == std::vector<int>{2, 0, 1, 3});
}

TEST_CASE("binarize_top_m marks exactly the top ranks") {
  RankingDataset data;
  data.n = 3;
  data.rankings = {{2, 0, 1}};
  const auto top1 = binarize_top_m(data, 1);
  CHECK(top1.rows[0] == std::vector<std::uint8_t>{0, 0, 1});
  const auto top2 = binarize_top_m(data, 2);
  CHECK(top2.rows[0] == std::vector<std::uint8_t>{1, 0, 1});
  CHECK_THROWS_AS(binarize_top_m(data, 0), std::invalid_argument);
  CHECK_THROWS_AS(binarize_top_m(data, 3), std::invalid_argument);
}

TEST_CASE("binarize_top_m rows sum to m") {
  const auto ranks = synthetic_rankings(50, 10, 0.15, 0.5, 8);
  for (int m : {1, 2, 9}) {
    const auto binary = binarize_top_m(ranks, m);
    for (const auto& row : binary.rows) {
      int total = 0;
      for (auto b : row) total += b;
      CHECK(total == m);
    }
  }
}

TEST_CASE("build_tree on perfectly correlated features") {
  // feature values move in lockstep; one query should pin down everything
  const auto data = make_dataset({{1, 0, 1, 1, 0},
                                  {1, 0, 1, 1, 0},
                                  {0, 1, 0, 0, 1},
                                  {0, 1, 0, 0, 1}});
  const auto tree = build_tree(data, data.n);
  REQUIRE(!tree.leaf(0));
  for (int u = 0; u < data.user_count(); ++u) {
    const auto revealed = elicit(tree, data.rows[u], 1);
    const auto prediction = infer_conditional_mode(data, revealed.revealed);
    CHECK(prediction == data.rows[u]);
  }
}

TEST_CASE("build_tree is deterministic and ties break to the lowest feature") {
  // all 16 patterns over 4 iid features: every gain ties, so splits follow
  // feature order
  std::vector<std::vector<std::uint8_t>> rows;
  for (int mask = 0; mask < 16; ++mask) {
    rows.push_back({static_cast<std::uint8_t>(mask & 1), static_cast<std::uint8_t>((mask >> 1) & 1),
                    static_cast<std::uint8_t>((mask >> 2) & 1),
                    static_cast<std::uint8_t>((mask >> 3) & 1)});
  }
  const auto data = make_dataset(rows);
  const auto tree = build_tree(data, 2);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[tree.nodes[0].child[0]].feature == 1);
  CHECK(tree.nodes[tree.nodes[0].child[1]].feature == 1);

  const auto again = build_tree(data, 2);
  REQUIRE(tree.nodes.size() == again.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    CHECK(tree.nodes[i].feature == again.nodes[i].feature);
    CHECK(tree.nodes[i].users == again.nodes[i].users);
  }
  CHECK_THROWS_AS(build_tree(BinaryDataset{}, 1), std::invalid_argument);
}

TEST_CASE("elicit walks the adaptive path") {
  const auto data = make_dataset({{0, 0, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}});
  const auto tree = build_tree(data, 3);
  REQUIRE(tree.nodes[0].feature == 0);  // dominant total information gain

  const auto none = elicit(tree, data.rows[1], 0);
  CHECK(none.revealed.empty());
  CHECK_FALSE(none.shortfall);

  const auto one = elicit(tree, data.rows[1], 1);
  REQUIRE(one.revealed.size() == 1);
  CHECK(one.revealed[0] == std::pair<int, int>{0, 0});

  // users landing in different branches answer different second queries
  const auto left = elicit(tree, data.rows[1], 2);   // f0 = 0 branch
  const auto right = elicit(tree, data.rows[3], 2);  // f0 = 1 branch
  REQUIRE(left.revealed.size() == 2);
  REQUIRE(right.revealed.size() == 2);
  CHECK(left.revealed[1].first != right.revealed[1].first);
}

TEST_CASE("elicit flags a shortfall when the path runs out") {
  const auto data = make_dataset({{0, 0}, {0, 0}, {1, 1}, {1, 1}});
  const auto tree = build_tree(data, 2);
  // after the first answer each child is pure, so the second query cannot be asked
  const auto result = elicit(tree, data.rows[0], 2);
  CHECK(result.shortfall);
  CHECK(result.revealed.size() == 1);
}

TEST_CASE("elicit_fixed follows the breadth-first order") {
  const auto data = make_dataset({{0, 0, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}});
  const auto tree = build_tree(data, 3);
  const auto order = breadth_first_feature_order(tree);
  REQUIRE(!order.empty());
  CHECK(order[0] == tree.nodes[0].feature);
  const auto fixed = elicit_fixed(order, data.rows[2], 2);
  REQUIRE(fixed.revealed.size() == 2);
  CHECK(fixed.revealed[0].first == order[0]);
  CHECK(fixed.revealed[1].first == order[1]);
}

TEST_CASE("infer_conditional_mode: verbatim reveals and majority completion") {
  const auto data = make_dataset({{1, 1, 0}, {1, 1, 1}, {0, 0, 1}});

  // full reveal echoes the user
  std::vector<std::pair<int, int>> full{{0, 1}, {1, 1}, {2, 0}};
  CHECK(infer_conditional_mode(data, full) == std::vector<std::uint8_t>{1, 1, 0});

  // empty reveal falls back to global majorities (f2 majority is 1)
  CHECK(infer_conditional_mode(data, {}) == std::vector<std::uint8_t>{1, 1, 1});

  // the 3-user toy case: f0=1 matches two users, f2 ties -> 0
  std::vector<std::pair<int, int>> partial{{0, 1}};
  CHECK(infer_conditional_mode(data, partial) == std::vector<std::uint8_t>{1, 1, 0});
}

TEST_CASE("infer_conditional_mode backs off from the newest reveal") {
  const auto data = make_dataset({{1, 1, 0}, {1, 1, 1}, {0, 0, 1}});
  // nobody has f0=1 and f1=0; dropping the newest pair leaves the f0=1 pair
  std::vector<std::pair<int, int>> revealed{{0, 1}, {1, 0}};
  const auto prediction = infer_conditional_mode(data, revealed);
  CHECK(prediction == std::vector<std::uint8_t>{1, 0, 0});  // reveals stay verbatim
  CHECK_THROWS_AS(infer_conditional_mode(data, std::vector<std::pair<int, int>>{{0, 1}, {0, 0}}),
                  std::invalid_argument);
}

TEST_CASE("sweep: full elicitation earns n - c*n with zero inequality") {
  const auto ranks = synthetic_rankings(200, 8, 0.2, 0.5, 21);
  const auto data = binarize_top_m(ranks, 2);
  const auto tree = build_tree(data, data.n);
  SweepOptions options;
  options.query_cost = 0.3;
  const std::vector<double> gammas{0.0, 5.0};
  const auto rows = sweep(data, tree, gammas, options);
  REQUIRE(rows.size() == gammas.size() * (data.n + 1));
  for (const auto& row : rows) {
    if (row.k == data.n) {
      CHECK(row.mean_utility == doctest::Approx(8.0 - 0.3 * 8.0).epsilon(1e-12));
      CHECK(row.gini == 0.0);
    }
  }
}

TEST_CASE("sweep is bit-for-bit reproducible and thread-stable") {
  const auto ranks = synthetic_rankings(300, 6, 0.25, 0.4, 5);
  const auto data = binarize_top_m(ranks, 2);
  const auto tree = build_tree(data, data.n);
  SweepOptions serial;
  SweepOptions threaded;
  threaded.threads = 4;
  const std::vector<double> gammas{0.0, 1.0, 5.0};
  const auto a = sweep(data, tree, gammas, serial);
  const auto b = sweep(data, tree, gammas, serial);
  const auto c = sweep(data, tree, gammas, threaded);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mean_welfare == b[i].mean_welfare);
    CHECK(a[i].mean_utility == b[i].mean_utility);
    CHECK(a[i].gini == b[i].gini);
    CHECK(a[i].mean_welfare == c[i].mean_welfare);
    CHECK(a[i].mean_utility == c[i].mean_utility);
    CHECK(a[i].gini == c[i].gini);
  }
}

TEST_CASE("sweep supports a holdout population") {
  const auto ranks = synthetic_rankings(400, 6, 0.2, 0.5, 77);
  const auto data = binarize_top_m(ranks, 2);
  const auto [train, holdout] = split_dataset(data, 0.25, 3);
  CHECK(train.user_count() + holdout.user_count() == data.user_count());
  CHECK(holdout.user_count() == 100);
  const auto tree = build_tree(train, train.n);
  SweepOptions options;
  const std::vector<double> gammas{0.0};
  const auto rows = sweep(train, tree, gammas, options, &holdout);
  REQUIRE(!rows.empty());
  for (const auto& row : rows) CHECK(std::isfinite(row.mean_utility));
}

TEST_CASE("synthetic_rankings emits valid deterministic permutations") {
  const auto a = synthetic_rankings(100, 10, 0.1, 0.5, 99);
  const auto b = synthetic_rankings(100, 10, 0.1, 0.5, 99);
  REQUIRE(a.user_count() == 100);
  for (int u = 0; u < a.user_count(); ++u) {
    CHECK(a.rankings[u] == b.rankings[u]);
    std::set<int> seen(a.rankings[u].begin(), a.rankings[u].end());
    CHECK(seen.size() == 10);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 9);
  }
}

TEST_CASE("empirical config parsing") {
  std::istringstream in(
      "# pipeline settings\n"
      "format = sushi\n"
      "metadata_columns = 2\n"
      "m = 2\n"
      "max_depth = 10\n");
  const auto config = load_empirical_config(in);
  CHECK(config.format == RankingFormat::kSushiOrder);
  CHECK(config.metadata_columns == 2);
  CHECK(config.top_m == 2);
  CHECK(config.max_depth == 10);

  std::istringstream bad("mystery = 4\n");
  CHECK_THROWS_AS(load_empirical_config(bad), DataError);
  std::istringstream malformed("just some words\n");
  CHECK_THROWS_AS(load_empirical_config(malformed), DataError);
}
