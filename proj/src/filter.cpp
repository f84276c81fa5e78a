#include "varigen/filter.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "varigen/error.hpp"
#include "varigen/text.hpp"

namespace varigen {

namespace {
constexpr const char* kFeatureNames[FilterFeatures::kCount] = {
    "src_len", "tgt_len", "unaligned_fraction", "norm_confidence",
    "one_to_one_fraction"};
}

const char* FilterFeatures::name(std::size_t i) { return kFeatureNames[i]; }

FilterFeatures extract_features(const SentencePair& pair,
                                const AlignmentLinks& links) {
  const AlignmentStats stats = alignment_stats(pair, links);
  FilterFeatures f;
  f.values[0] = static_cast<double>(pair.src_tokens.size());
  f.values[1] = static_cast<double>(pair.tgt_tokens.size());
  f.values[2] = stats.unaligned_fraction;
  f.values[3] = stats.mean_confidence;
  f.values[4] = stats.one_to_one_fraction;
  return f;
}

const char* filter_label_name(FilterLabel label) {
  return label == FilterLabel::Keep ? "keep" : "reject";
}

FilterLabel parse_filter_label(const std::string& s) {
  if (s == "keep") return FilterLabel::Keep;
  if (s == "reject") return FilterLabel::Reject;
  fail("unknown label '" + s + "', expected 'keep' or 'reject'");
}

std::vector<LabeledExample> load_labeled_examples(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open labeled examples file: " + path);
  std::vector<LabeledExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_whitespace(line);
    if (fields.size() != FilterFeatures::kCount + 1) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": expected "
          << FilterFeatures::kCount + 1 << " columns, got " << fields.size();
      fail(msg.str());
    }
    LabeledExample ex;
    for (std::size_t i = 0; i < FilterFeatures::kCount; ++i)
      if (!parse_double(fields[i], ex.features.values[i])) {
        std::ostringstream msg;
        msg << path << ":" << line_no << ": non-numeric feature '" << fields[i] << "'";
        fail(msg.str());
      }
    ex.label = parse_filter_label(fields[FilterFeatures::kCount]);
    out.push_back(std::move(ex));
  }
  return out;
}

double gini(std::size_t keep_count, std::size_t reject_count) {
  const std::size_t total = keep_count + reject_count;
  if (total == 0) fail("gini of an empty node");
  const double pk = static_cast<double>(keep_count) / static_cast<double>(total);
  const double pr = static_cast<double>(reject_count) / static_cast<double>(total);
  return 1.0 - (pk * pk + pr * pr);
}

namespace {

struct BestSplit {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double weighted_gini = 0.0;
};

// Brute-force best split over midpoints of consecutive distinct sorted
// values, per feature. Ties resolved by (lower feature, lower threshold)
// because the scan is in that order and only strict improvements replace
// the incumbent.
BestSplit find_best_split(const std::vector<LabeledExample>& examples,
                          const std::vector<std::size_t>& ids,
                          int min_samples_leaf) {
  BestSplit best;
  const std::size_t n = ids.size();
  std::vector<std::pair<double, FilterLabel>> column(n);
  for (std::size_t f = 0; f < FilterFeatures::kCount; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      const LabeledExample& ex = examples[ids[i]];
      column[i] = {ex.features.values[f], ex.label};
    }
    std::sort(column.begin(), column.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t left_keep = 0, left_reject = 0;
    std::size_t total_keep = 0, total_reject = 0;
    for (const auto& [_, label] : column)
      (label == FilterLabel::Keep ? total_keep : total_reject) += 1;

    for (std::size_t i = 0; i + 1 < n; ++i) {
      (column[i].second == FilterLabel::Keep ? left_keep : left_reject) += 1;
      if (column[i].first == column[i + 1].first) continue;  // not a boundary
      const std::size_t left_n = i + 1;
      const std::size_t right_n = n - left_n;
      if (left_n < static_cast<std::size_t>(min_samples_leaf) ||
          right_n < static_cast<std::size_t>(min_samples_leaf))
        continue;
      const double threshold = 0.5 * (column[i].first + column[i + 1].first);
      const double weighted =
          (static_cast<double>(left_n) * gini(left_keep, left_reject) +
           static_cast<double>(right_n) *
               gini(total_keep - left_keep, total_reject - left_reject)) /
          static_cast<double>(n);
      if (!best.found || weighted < best.weighted_gini) {
        best = {true, f, threshold, weighted};
      }
    }
  }
  return best;
}

}  // namespace

DecisionTree DecisionTree::train(const std::vector<LabeledExample>& examples,
                                 int min_samples_split, int min_samples_leaf,
                                 std::optional<int> max_depth) {
  if (examples.empty()) fail("train: no examples");
  if (min_samples_split < 2) fail("min_samples_split must be >= 2");
  if (min_samples_leaf < 1) fail("min_samples_leaf must be >= 1");

  DecisionTree tree;

  // returns the node index for the example subset `ids`
  auto grow = [&](auto&& self, const std::vector<std::size_t>& ids,
                  int depth) -> int {
    std::size_t keep = 0, reject = 0;
    for (std::size_t id : ids)
      (examples[id].label == FilterLabel::Keep ? keep : reject) += 1;

    const int me = static_cast<int>(tree.nodes_.size());
    tree.nodes_.emplace_back();
    tree.nodes_[me].n_keep = keep;
    tree.nodes_[me].n_reject = reject;
    // majority label; ties reject
    tree.nodes_[me].label = keep > reject ? FilterLabel::Keep : FilterLabel::Reject;

    const bool pure = keep == 0 || reject == 0;
    const bool too_small = ids.size() < static_cast<std::size_t>(min_samples_split);
    const bool at_depth = max_depth && depth >= *max_depth;
    if (pure || too_small || at_depth) return me;

    const BestSplit best = find_best_split(examples, ids, min_samples_leaf);
    if (!best.found || best.weighted_gini >= gini(keep, reject))
      return me;  // no split strictly decreases impurity

    std::vector<std::size_t> left_ids, right_ids;
    for (std::size_t id : ids)
      (examples[id].features.values[best.feature] <= best.threshold ? left_ids
                                                                    : right_ids)
          .push_back(id);

    tree.nodes_[me].feature = static_cast<int>(best.feature);
    tree.nodes_[me].threshold = best.threshold;
    const int left = self(self, left_ids, depth + 1);
    const int right = self(self, right_ids, depth + 1);
    tree.nodes_[me].left = left;
    tree.nodes_[me].right = right;
    return me;
  };

  std::vector<std::size_t> all(examples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  grow(grow, all, 0);
  return tree;
}

FilterLabel DecisionTree::classify(const FilterFeatures& features) const {
  const Node* node = &nodes_.front();
  while (!node->is_leaf()) {
    const double v = features.values[static_cast<std::size_t>(node->feature)];
    node = &nodes_[static_cast<std::size_t>(v <= node->threshold ? node->left
                                                                 : node->right)];
  }
  return node->label;
}

namespace {

nlohmann::ordered_json node_to_json(const std::vector<DecisionTree::Node>& nodes,
                                    int idx) {
  const DecisionTree::Node& node = nodes[static_cast<std::size_t>(idx)];
  nlohmann::ordered_json j;
  if (node.is_leaf()) {
    j["type"] = "leaf";
    j["label"] = filter_label_name(node.label);
    j["counts"] = {{"keep", node.n_keep}, {"reject", node.n_reject}};
  } else {
    j["type"] = "internal";
    j["feature"] = node.feature;
    j["feature_name"] = FilterFeatures::name(static_cast<std::size_t>(node.feature));
    j["threshold"] = node.threshold;
    j["left"] = node_to_json(nodes, node.left);
    j["right"] = node_to_json(nodes, node.right);
  }
  return j;
}

int node_from_json(const nlohmann::json& j, std::vector<DecisionTree::Node>& nodes) {
  const int me = static_cast<int>(nodes.size());
  nodes.emplace_back();
  const std::string type = j.at("type").get<std::string>();
  if (type == "leaf") {
    nodes[me].label = parse_filter_label(j.at("label").get<std::string>());
    if (j.contains("counts")) {
      nodes[me].n_keep = j["counts"].value("keep", 0);
      nodes[me].n_reject = j["counts"].value("reject", 0);
    }
  } else if (type == "internal") {
    const int feature = j.at("feature").get<int>();
    if (feature < 0 || feature >= static_cast<int>(FilterFeatures::kCount))
      fail("tree file: feature index " + std::to_string(feature) + " out of range");
    nodes[me].feature = feature;
    nodes[me].threshold = j.at("threshold").get<double>();
    const int left = node_from_json(j.at("left"), nodes);
    const int right = node_from_json(j.at("right"), nodes);
    nodes[me].left = left;
    nodes[me].right = right;
  } else {
    fail("tree file: unknown node type '" + type + "'");
  }
  return me;
}

}  // namespace

std::string DecisionTree::to_json() const {
  return node_to_json(nodes_, 0).dump(2);
}

DecisionTree DecisionTree::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("tree file: ") + e.what());
  }
  DecisionTree tree;
  node_from_json(j, tree.nodes_);
  return tree;
}

void DecisionTree::save_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail("cannot open for writing: " + path);
  out << to_json() << '\n';
  if (!out) fail("write failed: " + path);
}

DecisionTree DecisionTree::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open tree file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

void FilterReportBuilder::record(const FilterFeatures& features, FilterLabel label) {
  auto& sums = label == FilterLabel::Keep ? kept_sum_ : rejected_sum_;
  auto& count = label == FilterLabel::Keep ? report_.kept : report_.rejected;
  for (std::size_t i = 0; i < FilterFeatures::kCount; ++i)
    sums[i] += features.values[i];
  ++count;
}

FilterReport FilterReportBuilder::finish() const {
  FilterReport report = report_;
  for (std::size_t i = 0; i < FilterFeatures::kCount; ++i) {
    if (report.kept > 0)
      report.kept_feature_mean[i] = kept_sum_[i] / static_cast<double>(report.kept);
    if (report.rejected > 0)
      report.rejected_feature_mean[i] =
          rejected_sum_[i] / static_cast<double>(report.rejected);
  }
  return report;
}

FilterReport filter_corpus(
    const std::vector<std::pair<SentencePair, AlignmentLinks>>& batch,
    const DecisionTree& tree, std::vector<bool>& keep_mask) {
  keep_mask.assign(batch.size(), false);
  FilterReportBuilder builder;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const FilterFeatures f = extract_features(batch[i].first, batch[i].second);
    const FilterLabel label = tree.classify(f);
    keep_mask[i] = label == FilterLabel::Keep;
    builder.record(f, label);
  }
  return builder.finish();
}

std::string FilterReport::to_text() const {
  std::ostringstream out;
  out << "kept      " << kept << "\n"
      << "rejected  " << rejected << "\n";
  out << "feature means (kept | rejected):\n";
  for (std::size_t i = 0; i < FilterFeatures::kCount; ++i) {
    out << "  " << std::left << std::setw(20) << FilterFeatures::name(i)
        << std::setprecision(6) << kept_feature_mean[i] << " | "
        << rejected_feature_mean[i] << "\n";
  }
  return out.str();
}

std::string FilterReport::to_json() const {
  nlohmann::ordered_json j;
  j["kept"] = kept;
  j["rejected"] = rejected;
  for (std::size_t i = 0; i < FilterFeatures::kCount; ++i) {
    j["kept_feature_mean"][FilterFeatures::name(i)] = kept_feature_mean[i];
    j["rejected_feature_mean"][FilterFeatures::name(i)] = rejected_feature_mean[i];
  }
  return j.dump(2);
}

}  // namespace varigen
