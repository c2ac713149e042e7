#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace elicit {

/// Complete rankings: rankings[u][r] is the item at rank position r, best
/// first. Every row is a permutation of 0..n-1.
struct RankingDataset {
  int n = 0;
  std::vector<std::vector<int>> rankings;

  int user_count() const { return static_cast<int>(rankings.size()); }
};

enum class RankingFormat {
  kGeneric,     // whitespace-separated item indices in rank order, one user
                // per line, with a configurable count of leading metadata
                // columns to skip
  kSushiOrder,  // the published sushi order-file layout: an optional count
                // header line, then per-user lines with two leading metadata
                // columns before the item ids
};

struct RankingReadOptions {
  RankingFormat format = RankingFormat::kGeneric;
  int metadata_columns = 0;  // generic format only; the sushi preset uses 2
  int item_count = -1;       // -1 infers n from the first data line
};

/// Parses rankings from a stream; malformed lines raise DataError naming the
/// 1-based line number.
RankingDataset load_rankings(std::istream& in, const RankingReadOptions& options);

struct BinaryDataset {
  int n = 0;
  std::vector<std::vector<std::uint8_t>> rows;  // rows[u][item]

  int user_count() const { return static_cast<int>(rows.size()); }
};

/// Item gets a 1 iff its rank position is among the first m. Every row of the
/// result sums to exactly m.
BinaryDataset binarize_top_m(const RankingDataset& data, int m = 2);

/// Greedy information-gain query tree. Each split feature maximizes the sum
/// over all features of the mutual information with the split answer,
/// computed on the users reaching the node; ties go to the lowest feature
/// index and no feature repeats along a path. Splitting stops at max_depth or
/// when a node's users are identical on all features.
struct ElicitationTree {
  struct Node {
    int feature = -1;        // split feature; -1 marks a leaf
    int child[2] = {-1, -1};  // child[b] handles answer b
    int depth = 0;
    std::vector<int> users;  // training users reaching this node
  };
  int n = 0;
  int max_depth = 0;
  std::vector<Node> nodes;  // nodes[0] is the root

  bool leaf(int node) const { return nodes[node].feature < 0; }
};

ElicitationTree build_tree(const BinaryDataset& data, int max_depth);

/// Split features in breadth-first order, deduplicated: the non-adaptive
/// query order used for sensitivity checks.
std::vector<int> breadth_first_feature_order(const ElicitationTree& tree);

struct Elicitation {
  std::vector<std::pair<int, int>> revealed;  // (feature, answer) in query order
  bool shortfall = false;  // the path ended before k queries could be asked
};

/// Adaptive traversal: answer the current node's split feature with the
/// user's true bit and descend, k times. A path ending early returns whatever
/// was revealed with the shortfall flag set.
Elicitation elicit(const ElicitationTree& tree, std::span<const std::uint8_t> user_bits, int k);

/// Non-adaptive variant following a fixed feature order.
Elicitation elicit_fixed(std::span<const int> order, std::span<const std::uint8_t> user_bits,
                         int k);

/// Predicts a full bit vector: revealed features verbatim, every other
/// feature the majority bit among training users matching all revealed pairs
/// (ties predict 0). If nothing matches, the most recently revealed pair is
/// dropped until the match set is non-empty (the empty condition yields the
/// global marginals).
std::vector<std::uint8_t> infer_conditional_mode(
    const BinaryDataset& data, std::span<const std::pair<int, int>> revealed);

struct SweepRow {
  double gamma = 0.0;
  int k = 0;
  double mean_welfare = 0.0;
  double mean_utility = 0.0;
  double gini = 0.0;
};

enum class ElicitOrder { kAdaptive, kFixedBreadthFirst };

struct SweepOptions {
  double query_cost = 0.3;
  bool zero_shift = true;
  int k_min = 0;
  int k_max = -1;  // -1 means n
  ElicitOrder order = ElicitOrder::kAdaptive;
  int threads = 1;
};

/// Runs the elicit-and-complete pipeline for every k in range over every
/// evaluation user and aggregates utility per the welfare family. Welfare
/// uses the population mean of the transformed utilities, so values are
/// population-size independent. Rows come out gamma-major, k ascending, and
/// are bit-for-bit reproducible: nothing in the pipeline is randomized.
/// `eval` defaults to the training population (in-sample, matching standard
/// reporting); pass a holdout split for robustness checks. Users whose tree
/// path ends before k queries are still valued at the nominal cost c*k.
std::vector<SweepRow> sweep(const BinaryDataset& train, const ElicitationTree& tree,
                            std::span<const double> gammas, const SweepOptions& options,
                            const BinaryDataset* eval = nullptr);

/// Deterministic train/holdout split by user, for the robustness path.
std::pair<BinaryDataset, BinaryDataset> split_dataset(const BinaryDataset& data,
                                                      double holdout_fraction,
                                                      std::uint64_t seed);

/// Synthetic stand-in rankings with two opposed taste clusters: cluster 0
/// favors the first half of the items, cluster 1 the second half, each
/// favored-set membership flipped independently with probability p; ranks
/// order favored items above the rest with uniform jitter inside each block.
RankingDataset synthetic_rankings(int users, int n, double p, double alpha, std::uint64_t seed);

/// Key-value config file for the empirical pipeline (keys: format,
/// metadata_columns, m, max_depth; '#' starts a comment).
struct EmpiricalConfig {
  std::optional<RankingFormat> format;
  std::optional<int> metadata_columns;
  std::optional<int> top_m;
  std::optional<int> max_depth;
};

EmpiricalConfig load_empirical_config(std::istream& in);

}  // namespace elicit
