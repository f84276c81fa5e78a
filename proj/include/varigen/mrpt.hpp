#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "varigen/embedding.hpp"

namespace varigen {

struct KnnResult {
  // (word, Euclidean distance), ascending distance, ties by word.
  std::vector<std::pair<std::string, double>> neighbors;
  // True when fewer than k candidates existed.
  bool exhausted = false;
};

/// Forest of random projection trees over one embedding table. Each tree
/// recursively median-splits on a random unit direction per level (all nodes
/// at a level share the direction); a query is routed down every tree and a
/// point becomes a candidate when it appears in at least `votes` of the
/// reached leaves. Candidates are then rescored exactly.
///
/// The index holds a pointer to the table and must not outlive it. Build is
/// deterministic for a fixed (seed, trees, leaf_size, data); queries on the
/// immutable index are safe from many threads.
class MrptIndex {
 public:
  struct Node {
    double threshold = 0.0;
    std::int32_t left = -1;   // leaf when left < 0
    std::int32_t right = -1;
    std::uint64_t begin = 0;  // leaf range into Tree::order
    std::uint64_t end = 0;
  };
  struct Tree {
    std::vector<Eigen::VectorXd> directions;  // one unit vector per level
    std::vector<Node> nodes;                  // nodes[0] is the root
    std::vector<std::uint64_t> order;         // leaves are contiguous ranges
  };

  static MrptIndex build(const EmbeddingTable& table, int trees, int leaf_size,
                         std::int64_t seed);

  KnnResult query(const Eigen::Ref<const Eigen::VectorXd>& q, int k,
                  int votes) const;
  /// Point ids voted into >= votes reached leaves, ascending id. Exposed for
  /// property tests (subset/monotonicity).
  std::vector<std::size_t> candidate_set(
      const Eigen::Ref<const Eigen::VectorXd>& q, int votes) const;

  int tree_count() const { return static_cast<int>(trees_.size()); }
  int leaf_size() const { return leaf_size_; }
  std::int64_t seed() const { return seed_; }
  const EmbeddingTable& table() const { return *table_; }
  const std::vector<Tree>& trees() const { return trees_; }
  /// leaf depth -> leaf count, over all trees.
  std::map<int, std::size_t> leaf_depth_histogram() const;

  // Single binary file, little-endian, magic "MRPT1". Loading validates the
  // magic and the companion table's dimension and point count.
  void save(const std::string& path) const;
  static MrptIndex load(const std::string& path, const EmbeddingTable& table);

 private:
  MrptIndex() = default;

  const EmbeddingTable* table_ = nullptr;
  std::vector<Tree> trees_;
  int leaf_size_ = 0;
  std::int64_t seed_ = 0;
};

/// Exact top-k by Euclidean distance, ascending, ties by word.
KnnResult exact_knn(const EmbeddingTable& table,
                    const Eigen::Ref<const Eigen::VectorXd>& q, int k);

/// Mean over queries of |approx top-k ∩ exact top-k| / k.
double recall_at_k(const MrptIndex& index,
                   const std::vector<Eigen::VectorXd>& queries, int k,
                   int votes);

}  // namespace varigen
