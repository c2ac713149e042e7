#include "elicit/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "elicit/errors.hpp"
#include "elicit/numeric.hpp"
#include "elicit/parallel.hpp"
#include "elicit/welfare.hpp"

namespace elicit {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

int parse_int(const std::string& tok, int line_number) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_number) + ": '" + tok + "' is not an integer");
  }
}

// Empirical mutual information between two binary columns over `users`.
double mutual_information(const BinaryDataset& data, std::span<const int> users, int x, int y) {
  double joint[2][2] = {{0, 0}, {0, 0}};
  for (int u : users) joint[data.rows[u][x]][data.rows[u][y]] += 1.0;
  const double total = static_cast<double>(users.size());
  const double mx[2] = {joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]};
  const double my[2] = {joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]};
  double info = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (joint[i][j] == 0.0) continue;
      info += (joint[i][j] / total) * std::log(joint[i][j] * total / (mx[i] * my[j]));
    }
  }
  return info;
}

bool all_rows_identical(const BinaryDataset& data, std::span<const int> users) {
  for (std::size_t i = 1; i < users.size(); ++i) {
    if (data.rows[users[i]] != data.rows[users[0]]) return false;
  }
  return true;
}

void grow(ElicitationTree& tree, const BinaryDataset& data, int node, std::vector<bool>& used) {
  const auto& nd = tree.nodes[node];
  if (nd.depth >= tree.max_depth || nd.users.empty() || all_rows_identical(data, nd.users)) {
    return;  // leaf
  }
  int best = -1;
  double best_gain = -1.0;
  for (int s = 0; s < data.n; ++s) {
    if (used[s]) continue;
    double gain = 0.0;
    for (int f = 0; f < data.n; ++f) gain += mutual_information(data, tree.nodes[node].users, s, f);
    if (gain > best_gain) {
      best_gain = gain;
      best = s;
    }
  }
  if (best < 0) return;  // every feature already queried on this path

  std::vector<int> zeros, ones;
  for (int u : tree.nodes[node].users) {
    (data.rows[u][best] ? ones : zeros).push_back(u);
  }
  tree.nodes[node].feature = best;
  for (int b = 0; b < 2; ++b) {
    ElicitationTree::Node child;
    child.depth = tree.nodes[node].depth + 1;
    child.users = b == 0 ? std::move(zeros) : std::move(ones);
    tree.nodes.push_back(std::move(child));
    tree.nodes[node].child[b] = static_cast<int>(tree.nodes.size()) - 1;
  }
  used[best] = true;
  grow(tree, data, tree.nodes[node].child[0], used);
  grow(tree, data, tree.nodes[node].child[1], used);
  used[best] = false;
}

double sample_gini_or_zero(std::vector<double> utilities) {
  const auto [lo, hi] = std::minmax_element(utilities.begin(), utilities.end());
  if (*lo == *hi) return 0.0;
  if (*lo < 0.0) {
    const double shift = *lo;
    for (double& u : utilities) u -= shift;
  }
  // G = 2 * sum(i * u_(i)) / (m * sum(u)) - (m + 1) / m  with 1-based ranks
  std::sort(utilities.begin(), utilities.end());
  CompensatedSum total, ranked;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    total.add(utilities[i]);
    ranked.add(static_cast<double>(i + 1) * utilities[i]);
  }
  const double m = static_cast<double>(utilities.size());
  return 2.0 * ranked.value() / (m * total.value()) - (m + 1.0) / m;
}

}  // namespace

RankingDataset load_rankings(std::istream& in, const RankingReadOptions& options) {
  const bool sushi = options.format == RankingFormat::kSushiOrder;
  const int metadata = sushi ? 2 : options.metadata_columns;
  if (metadata < 0) throw std::invalid_argument("load_rankings: negative metadata column count");

  RankingDataset data;
  data.n = options.item_count;
  std::string line;
  int line_number = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++line_number;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    // The published sushi order files open with a "<users> <items>" count
    // line; any line too short to hold metadata plus one item is the header.
    if (sushi && !saw_data && static_cast<int>(tokens.size()) <= 2) continue;

    if (static_cast<int>(tokens.size()) <= metadata) {
      throw DataError("line " + std::to_string(line_number) + ": only " +
                      std::to_string(tokens.size()) + " columns, expected metadata plus items");
    }
    const int items = static_cast<int>(tokens.size()) - metadata;
    if (data.n < 0) data.n = items;
    if (items != data.n) {
      throw DataError("line " + std::to_string(line_number) + ": " + std::to_string(items) +
                      " items, expected " + std::to_string(data.n));
    }
    std::vector<int> ranking(data.n);
    std::vector<bool> seen(data.n, false);
    for (int r = 0; r < data.n; ++r) {
      const int item = parse_int(tokens[metadata + r], line_number);
      if (item < 0 || item >= data.n) {
        throw DataError("line " + std::to_string(line_number) + ": item index " +
                        std::to_string(item) + " out of [0, " + std::to_string(data.n - 1) + "]");
      }
      if (seen[item]) {
        throw DataError("line " + std::to_string(line_number) + ": duplicate item index " +
                        std::to_string(item));
      }
      seen[item] = true;
      ranking[r] = item;
    }
    data.rankings.push_back(std::move(ranking));
    saw_data = true;
  }
  if (!saw_data) throw DataError("no ranking rows found");
  return data;
}

BinaryDataset binarize_top_m(const RankingDataset& data, int m) {
  if (m < 1 || m >= data.n) throw std::invalid_argument("binarize_top_m: m must be in [1, n)");
  BinaryDataset out;
  out.n = data.n;
  out.rows.reserve(data.rankings.size());
  for (const auto& ranking : data.rankings) {
    std::vector<std::uint8_t> row(data.n, 0);
    for (int r = 0; r < m; ++r) row[ranking[r]] = 1;
    out.rows.push_back(std::move(row));
  }
  return out;
}

ElicitationTree build_tree(const BinaryDataset& data, int max_depth) {
  if (data.rows.empty()) throw std::invalid_argument("build_tree: empty dataset");
  if (max_depth < 0 || max_depth > data.n) {
    throw std::invalid_argument("build_tree: max_depth out of [0, n]");
  }
  ElicitationTree tree;
  tree.n = data.n;
  tree.max_depth = max_depth;
  ElicitationTree::Node root;
  root.users.resize(data.rows.size());
  std::iota(root.users.begin(), root.users.end(), 0);
  tree.nodes.push_back(std::move(root));
  std::vector<bool> used(data.n, false);
  grow(tree, data, 0, used);
  return tree;
}

std::vector<int> breadth_first_feature_order(const ElicitationTree& tree) {
  std::vector<int> order;
  std::vector<bool> listed(tree.n, false);
  std::vector<int> frontier{0};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int idx : frontier) {
      const auto& nd = tree.nodes[idx];
      if (nd.feature < 0) continue;
      if (!listed[nd.feature]) {
        listed[nd.feature] = true;
        order.push_back(nd.feature);
      }
      next.push_back(nd.child[0]);
      next.push_back(nd.child[1]);
    }
    frontier = std::move(next);
  }
  return order;
}

Elicitation elicit(const ElicitationTree& tree, std::span<const std::uint8_t> user_bits, int k) {
  if (static_cast<int>(user_bits.size()) != tree.n) {
    throw std::invalid_argument("elicit: user vector length differs from tree");
  }
  if (k < 0 || k > tree.n) throw std::invalid_argument("elicit: k out of [0, n]");
  Elicitation result;
  int node = 0;
  for (int step = 0; step < k; ++step) {
    const auto& nd = tree.nodes[node];
    if (nd.feature < 0) {
      result.shortfall = true;
      break;
    }
    const int answer = user_bits[nd.feature] ? 1 : 0;
    result.revealed.emplace_back(nd.feature, answer);
    node = nd.child[answer];
  }
  return result;
}

Elicitation elicit_fixed(std::span<const int> order, std::span<const std::uint8_t> user_bits,
                         int k) {
  if (k < 0) throw std::invalid_argument("elicit_fixed: negative k");
  Elicitation result;
  for (int step = 0; step < k; ++step) {
    if (step >= static_cast<int>(order.size())) {
      result.shortfall = true;
      break;
    }
    const int feature = order[step];
    result.revealed.emplace_back(feature, user_bits[feature] ? 1 : 0);
  }
  return result;
}

std::vector<std::uint8_t> infer_conditional_mode(
    const BinaryDataset& data, std::span<const std::pair<int, int>> revealed) {
  std::vector<int> value_of(data.n, -1);
  for (const auto& [feature, value] : revealed) {
    if (feature < 0 || feature >= data.n) {
      throw std::invalid_argument("infer_conditional_mode: feature out of range");
    }
    if (value_of[feature] != -1) {
      throw std::invalid_argument("infer_conditional_mode: repeated feature");
    }
    value_of[feature] = value ? 1 : 0;
  }

  // Back off from the most recent reveal until someone matches; the empty
  // condition matches everyone.
  std::vector<int> matched;
  for (int keep = static_cast<int>(revealed.size()); keep >= 0; --keep) {
    matched.clear();
    for (int u = 0; u < data.user_count(); ++u) {
      bool ok = true;
      for (int i = 0; i < keep; ++i) {
        if (data.rows[u][revealed[i].first] != revealed[i].second) {
          ok = false;
          break;
        }
      }
      if (ok) matched.push_back(u);
    }
    if (!matched.empty()) break;
  }

  std::vector<std::uint8_t> prediction(data.n, 0);
  for (int i = 0; i < data.n; ++i) {
    if (value_of[i] != -1) {
      prediction[i] = static_cast<std::uint8_t>(value_of[i]);
      continue;
    }
    int ones = 0;
    for (int u : matched) ones += data.rows[u][i];
    prediction[i] = 2 * ones > static_cast<int>(matched.size()) ? 1 : 0;  // tie -> 0
  }
  return prediction;
}

std::vector<SweepRow> sweep(const BinaryDataset& train, const ElicitationTree& tree,
                            std::span<const double> gammas, const SweepOptions& options,
                            const BinaryDataset* eval) {
  const BinaryDataset& population = eval ? *eval : train;
  if (gammas.empty()) throw std::invalid_argument("sweep: no gamma values");
  if (population.rows.empty()) throw std::invalid_argument("sweep: empty evaluation population");
  if (options.query_cost < 0.0) throw std::invalid_argument("sweep: negative query cost");
  if (population.n != train.n || tree.n != train.n) {
    throw std::invalid_argument("sweep: mismatched item counts");
  }
  const int n = train.n;
  const int k_max = options.k_max < 0 ? n : options.k_max;
  if (options.k_min < 0 || options.k_min > k_max || k_max > n) {
    throw std::invalid_argument("sweep: bad k range");
  }

  const std::vector<int> fixed_order = options.order == ElicitOrder::kFixedBreadthFirst
                                           ? breadth_first_feature_order(tree)
                                           : std::vector<int>{};
  const int users = population.user_count();

  struct KStats {
    double mean = 0.0;
    double gini = 0.0;
    std::vector<double> welfare;  // aligned with gammas
  };
  std::vector<KStats> stats(k_max - options.k_min + 1);

  for (int k = options.k_min; k <= k_max; ++k) {
    std::vector<double> utilities(users);
    constexpr int kChunk = 512;
    const std::size_t chunks = (users + kChunk - 1) / kChunk;
    parallel_for(chunks, options.threads, [&](std::size_t chunk) {
      // users on the same tree path share a prediction; cache per chunk
      std::map<std::vector<int>, std::vector<std::uint8_t>> cache;
      const int begin = static_cast<int>(chunk) * kChunk;
      const int end = std::min(users, begin + kChunk);
      for (int u = begin; u < end; ++u) {
        const auto& row = population.rows[u];
        const Elicitation el = options.order == ElicitOrder::kAdaptive
                                   ? elicit(tree, row, k)
                                   : elicit_fixed(fixed_order, row, k);
        std::vector<int> key;
        key.reserve(el.revealed.size() * 2);
        for (const auto& [f, v] : el.revealed) {
          key.push_back(f);
          key.push_back(v);
        }
        auto it = cache.find(key);
        if (it == cache.end()) {
          it = cache.emplace(std::move(key), infer_conditional_mode(train, el.revealed)).first;
        }
        const auto& prediction = it->second;
        std::vector<bool> is_revealed(n, false);
        for (const auto& [f, v] : el.revealed) is_revealed[f] = true;
        int mistakes = 0;
        for (int i = 0; i < n; ++i) {
          if (!is_revealed[i] && prediction[i] != row[i]) ++mistakes;
        }
        utilities[u] = n - options.query_cost * k - mistakes;
      }
    });

    KStats& st = stats[k - options.k_min];
    CompensatedSum mean_sum;
    for (double u : utilities) mean_sum.add(u);
    st.mean = mean_sum.value() / users;
    st.gini = sample_gini_or_zero(utilities);
    st.welfare.reserve(gammas.size());
    for (double gamma : gammas) {
      if (std::isinf(gamma)) {  // empirical maximin: the worst-off user
        st.welfare.push_back(*std::min_element(utilities.begin(), utilities.end()));
        continue;
      }
      CompensatedSum sum;
      for (double u : utilities) sum.add(welfare_weight(u, gamma, options.zero_shift));
      const double mean = sum.value() / users;
      st.welfare.push_back(gamma == 1.0 ? mean : mean / (1.0 - gamma));
    }
  }

  std::vector<SweepRow> rows;
  rows.reserve(gammas.size() * stats.size());
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    for (int k = options.k_min; k <= k_max; ++k) {
      const KStats& st = stats[k - options.k_min];
      rows.push_back({gammas[gi], k, st.welfare[gi], st.mean, st.gini});
    }
  }
  return rows;
}

std::pair<BinaryDataset, BinaryDataset> split_dataset(const BinaryDataset& data,
                                                      double holdout_fraction,
                                                      std::uint64_t seed) {
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: holdout fraction out of [0, 1)");
  }
  std::vector<int> order(data.user_count());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (int i = data.user_count() - 1; i > 0; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  const int holdout_count = static_cast<int>(std::llround(holdout_fraction * data.user_count()));
  BinaryDataset train, holdout;
  train.n = holdout.n = data.n;
  for (int i = 0; i < data.user_count(); ++i) {
    (i < holdout_count ? holdout : train).rows.push_back(data.rows[order[i]]);
  }
  if (train.rows.empty()) throw std::invalid_argument("split_dataset: training part empty");
  return {std::move(train), std::move(holdout)};
}

RankingDataset synthetic_rankings(int users, int n, double p, double alpha, std::uint64_t seed) {
  if (users < 1 || n < 2) throw std::invalid_argument("synthetic_rankings: need users >= 1, n >= 2");
  if (!(p >= 0.0 && p <= 0.5) || !(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("synthetic_rankings: p in [0, 0.5], alpha in [0, 1]");
  }
  std::mt19937_64 rng(seed);
  RankingDataset data;
  data.n = n;
  data.rankings.reserve(users);
  const int half = n / 2;
  for (int u = 0; u < users; ++u) {
    const int cluster = canonical_uniform(rng()) < alpha ? 0 : 1;
    std::vector<std::pair<double, int>> scored(n);
    for (int i = 0; i < n; ++i) {
      const bool favored_base = cluster == 0 ? i < half : i >= half;
      const bool flip = canonical_uniform(rng()) < p;
      const bool favored = favored_base != flip;
      scored[i] = {(favored ? 1.0 : 0.0) + canonical_uniform(rng()), i};
    }
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<int> ranking(n);
    for (int r = 0; r < n; ++r) ranking[r] = scored[r].second;
    data.rankings.push_back(std::move(ranking));
  }
  return data;
}

EmpiricalConfig load_empirical_config(std::istream& in) {
  EmpiricalConfig config;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!tokenize(line).empty()) {
        throw DataError("config line " + std::to_string(line_number) + ": expected key = value");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "format") {
      if (value == "generic") {
        config.format = RankingFormat::kGeneric;
      } else if (value == "sushi") {
        config.format = RankingFormat::kSushiOrder;
      } else {
        throw DataError("config line " + std::to_string(line_number) + ": unknown format '" +
                        value + "'");
      }
    } else if (key == "metadata_columns") {
      config.metadata_columns = parse_int(value, line_number);
    } else if (key == "m") {
      config.top_m = parse_int(value, line_number);
    } else if (key == "max_depth") {
      config.max_depth = parse_int(value, line_number);
    } else {
      throw DataError("config line " + std::to_string(line_number) + ": unknown key '" + key +
                      "'");
    }
  }
  return config;
}

}  // namespace elicit
