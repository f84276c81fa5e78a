#include "varigen/mrpt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "varigen/error.hpp"

namespace varigen {

namespace {

// Scores the given point ids against q and keeps the best k by
// (distance, word). Shared by the approximate and exact paths so both
// produce identical results on identical candidate sets, ties included.
KnnResult top_k_by_distance(std::vector<std::size_t> ids,
                            const Eigen::Ref<const Eigen::VectorXd>& q, int k,
                            const EmbeddingTable& table) {
  if (k < 1) fail("k must be >= 1");
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(ids.size());
  for (std::size_t id : ids)
    scored.emplace_back((table.view(id) - q).squaredNorm(), id);

  const auto better = [&](const std::pair<double, std::size_t>& a,
                          const std::pair<double, std::size_t>& b) {
    if (a.first != b.first) return a.first < b.first;
    return table.word(a.second) < table.word(b.second);
  };
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                 scored.size());
  std::nth_element(scored.begin(), scored.begin() + keep, scored.end(), better);
  std::sort(scored.begin(), scored.begin() + keep, better);

  KnnResult out;
  out.neighbors.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i)
    out.neighbors.emplace_back(table.word(scored[i].second),
                               std::sqrt(scored[i].first));
  out.exhausted = scored.size() < static_cast<std::size_t>(k);
  return out;
}

std::uint64_t mix_seed(std::int64_t seed, int tree) {
  // splitmix64 over (seed, tree) so per-tree streams are independent
  std::uint64_t z = static_cast<std::uint64_t>(seed) +
                    0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(tree + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct TreeBuilder {
  const EmbeddingTable& table;
  int leaf_size;
  std::mt19937_64 rng;
  std::normal_distribution<double> gauss{0.0, 1.0};
  MrptIndex::Tree tree;

  TreeBuilder(const EmbeddingTable& t, int ls, std::uint64_t seed)
      : table(t), leaf_size(ls), rng(seed) {}

  void sample_direction() {
    Eigen::VectorXd dir(static_cast<Eigen::Index>(table.dim()));
    do {
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = gauss(rng);
    } while (dir.norm() == 0.0);
    dir.normalize();
    tree.directions.push_back(std::move(dir));
  }

  // Builds the subtree over order[begin,end) and returns its node index.
  std::int32_t build(std::uint64_t begin, std::uint64_t end, std::size_t level) {
    const std::uint64_t count = end - begin;
    if (count <= static_cast<std::uint64_t>(leaf_size))
      return make_leaf(begin, end);
    if (level == tree.directions.size()) sample_direction();
    const Eigen::VectorXd& dir = tree.directions[level];

    std::vector<std::pair<double, std::uint64_t>> proj;
    proj.reserve(count);
    for (std::uint64_t i = begin; i < end; ++i) {
      const std::size_t id = tree.order[i];
      proj.emplace_back(table.view(id).dot(dir), tree.order[i]);
    }

    // median of the projections; for even counts the mean of the two middle
    // values. Ties at the median go left.
    std::vector<double> vals(count);
    for (std::uint64_t i = 0; i < count; ++i) vals[i] = proj[i].first;
    double median;
    if (count % 2 == 1) {
      std::nth_element(vals.begin(), vals.begin() + count / 2, vals.end());
      median = vals[count / 2];
    } else {
      std::nth_element(vals.begin(), vals.begin() + count / 2, vals.end());
      const double upper = vals[count / 2];
      const double lower = *std::max_element(vals.begin(), vals.begin() + count / 2);
      median = 0.5 * (lower + upper);
    }

    auto mid_it = std::stable_partition(
        proj.begin(), proj.end(),
        [median](const auto& p) { return p.first <= median; });
    const std::uint64_t mid = begin + static_cast<std::uint64_t>(mid_it - proj.begin());
    if (mid == begin || mid == end)
      return make_leaf(begin, end);  // all projections equal; stop splitting

    for (std::uint64_t i = 0; i < count; ++i) tree.order[begin + i] = proj[i].second;

    const std::int32_t me = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[me].threshold = median;
    tree.nodes[me].begin = begin;
    tree.nodes[me].end = end;
    const std::int32_t left = build(begin, mid, level + 1);
    const std::int32_t right = build(mid, end, level + 1);
    tree.nodes[me].left = left;
    tree.nodes[me].right = right;
    return me;
  }

  std::int32_t make_leaf(std::uint64_t begin, std::uint64_t end) {
    const std::int32_t me = static_cast<std::int32_t>(tree.nodes.size());
    MrptIndex::Node leaf;
    leaf.begin = begin;
    leaf.end = end;
    tree.nodes.push_back(leaf);
    return me;
  }
};

}  // namespace

MrptIndex MrptIndex::build(const EmbeddingTable& table, int trees, int leaf_size,
                           std::int64_t seed) {
  if (table.size() == 0) fail("cannot index an empty embedding table");
  if (trees < 1) fail("tree count must be >= 1");
  if (leaf_size < 1) fail("leaf_size must be >= 1");

  MrptIndex index;
  index.table_ = &table;
  index.leaf_size_ = leaf_size;
  index.seed_ = seed;
  index.trees_.reserve(static_cast<std::size_t>(trees));
  for (int t = 0; t < trees; ++t) {
    TreeBuilder builder(table, leaf_size, mix_seed(seed, t));
    builder.tree.order.resize(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) builder.tree.order[i] = i;
    builder.build(0, table.size(), 0);
    index.trees_.push_back(std::move(builder.tree));
  }
  return index;
}

std::vector<std::size_t> MrptIndex::candidate_set(
    const Eigen::Ref<const Eigen::VectorXd>& q, int votes) const {
  if (q.size() != static_cast<Eigen::Index>(table_->dim()))
    fail("query dimension does not match the index");
  if (votes < 1) fail("votes must be >= 1");
  if (votes > tree_count())
    fail("votes (" + std::to_string(votes) + ") exceeds tree count (" +
         std::to_string(tree_count()) + ")");

  std::vector<int> counts(table_->size(), 0);
  for (const Tree& tree : trees_) {
    std::size_t level = 0;
    const Node* node = &tree.nodes[0];
    while (!(node->left < 0)) {
      const double p = q.dot(tree.directions[level]);
      node = &tree.nodes[static_cast<std::size_t>(p <= node->threshold
                                                      ? node->left
                                                      : node->right)];
      ++level;
    }
    for (std::uint64_t i = node->begin; i < node->end; ++i)
      ++counts[tree.order[i]];
  }
  std::vector<std::size_t> candidates;
  for (std::size_t id = 0; id < counts.size(); ++id)
    if (counts[id] >= votes) candidates.push_back(id);
  return candidates;
}

KnnResult MrptIndex::query(const Eigen::Ref<const Eigen::VectorXd>& q, int k,
                           int votes) const {
  return top_k_by_distance(candidate_set(q, votes), q, k, *table_);
}

std::map<int, std::size_t> MrptIndex::leaf_depth_histogram() const {
  std::map<int, std::size_t> hist;
  for (const Tree& tree : trees_) {
    // depth-first walk tracking depth
    std::vector<std::pair<std::int32_t, int>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [idx, depth] = stack.back();
      stack.pop_back();
      const Node& node = tree.nodes[static_cast<std::size_t>(idx)];
      if (node.left < 0) {
        ++hist[depth];
      } else {
        stack.emplace_back(node.left, depth + 1);
        stack.emplace_back(node.right, depth + 1);
      }
    }
  }
  return hist;
}

KnnResult exact_knn(const EmbeddingTable& table,
                    const Eigen::Ref<const Eigen::VectorXd>& q, int k) {
  if (table.size() == 0) fail("exact_knn over an empty table");
  if (q.size() != static_cast<Eigen::Index>(table.dim()))
    fail("query dimension does not match the table");
  std::vector<std::size_t> ids(table.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return top_k_by_distance(std::move(ids), q, k, table);
}

double recall_at_k(const MrptIndex& index,
                   const std::vector<Eigen::VectorXd>& queries, int k,
                   int votes) {
  if (queries.empty()) fail("recall_at_k: no queries");
  double total = 0.0;
  for (const auto& q : queries) {
    const KnnResult approx = index.query(q, k, votes);
    const KnnResult exact = exact_knn(index.table(), q, k);
    std::size_t hits = 0;
    for (const auto& [word, _] : approx.neighbors)
      for (const auto& [exact_word, _2] : exact.neighbors)
        if (word == exact_word) {
          ++hits;
          break;
        }
    total += static_cast<double>(hits) / static_cast<double>(k);
  }
  return total / static_cast<double>(queries.size());
}

// ---------------------------------------------------------------------------
// serialization: magic "MRPT1", then little-endian u64/i64/f64 fields.

namespace {

constexpr char kMagic[5] = {'M', 'R', 'P', 'T', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, 8);
}
void put_i64(std::ostream& out, std::int64_t v) {
  put_u64(out, static_cast<std::uint64_t>(v));
}
void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (!in) fail("truncated index file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}
std::int64_t get_i64(std::istream& in) {
  return static_cast<std::int64_t>(get_u64(in));
}
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void MrptIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open for writing: " + path);
  out.write(kMagic, sizeof(kMagic));
  put_u64(out, table_->dim());
  put_u64(out, static_cast<std::uint64_t>(trees_.size()));
  put_u64(out, static_cast<std::uint64_t>(leaf_size_));
  put_i64(out, seed_);
  put_u64(out, table_->size());
  for (const Tree& tree : trees_) {
    put_u64(out, tree.directions.size());
    for (const auto& dir : tree.directions)
      for (Eigen::Index i = 0; i < dir.size(); ++i) put_f64(out, dir[i]);
    put_u64(out, tree.nodes.size());
    for (const Node& node : tree.nodes) {
      put_i64(out, node.left);
      put_i64(out, node.right);
      put_f64(out, node.threshold);
      put_u64(out, node.begin);
      put_u64(out, node.end);
    }
    put_u64(out, tree.order.size());
    for (std::uint64_t id : tree.order) put_u64(out, id);
  }
  if (!out) fail("write failed: " + path);
}

MrptIndex MrptIndex::load(const std::string& path, const EmbeddingTable& table) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open index file: " + path);
  char magic[5];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    fail(path + ": not an index file (bad magic)");
  const std::uint64_t dim = get_u64(in);
  if (dim != table.dim()) {
    std::ostringstream msg;
    msg << path << ": index dimension " << dim << " does not match table dimension "
        << table.dim();
    fail(msg.str());
  }
  const std::uint64_t tree_count = get_u64(in);
  const std::uint64_t leaf_size = get_u64(in);
  const std::int64_t seed = get_i64(in);
  const std::uint64_t points = get_u64(in);
  if (points != table.size()) {
    std::ostringstream msg;
    msg << path << ": index has " << points << " points, table has " << table.size();
    fail(msg.str());
  }

  MrptIndex index;
  index.table_ = &table;
  index.leaf_size_ = static_cast<int>(leaf_size);
  index.seed_ = seed;
  index.trees_.resize(tree_count);
  for (Tree& tree : index.trees_) {
    tree.directions.resize(get_u64(in));
    for (auto& dir : tree.directions) {
      dir.resize(static_cast<Eigen::Index>(dim));
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = get_f64(in);
    }
    tree.nodes.resize(get_u64(in));
    for (Node& node : tree.nodes) {
      node.left = static_cast<std::int32_t>(get_i64(in));
      node.right = static_cast<std::int32_t>(get_i64(in));
      node.threshold = get_f64(in);
      node.begin = get_u64(in);
      node.end = get_u64(in);
    }
    tree.order.resize(get_u64(in));
    for (auto& id : tree.order) id = get_u64(in);
  }
  return index;
}

}  // namespace varigen
