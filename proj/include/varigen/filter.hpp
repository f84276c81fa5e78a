#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "varigen/alignment.hpp"

namespace varigen {

/// The five alignment meta-features, fixed order.
struct FilterFeatures {
  std::array<double, 5> values{};

  static constexpr std::size_t kCount = 5;
  static const char* name(std::size_t i);

  double src_len() const { return values[0]; }
  double tgt_len() const { return values[1]; }
  double unaligned_fraction() const { return values[2]; }
  double norm_confidence() const { return values[3]; }
  double one_to_one_fraction() const { return values[4]; }
};

FilterFeatures extract_features(const SentencePair& pair,
                                const AlignmentLinks& links);

enum class FilterLabel { Keep, Reject };
const char* filter_label_name(FilterLabel label);
FilterLabel parse_filter_label(const std::string& s);

struct LabeledExample {
  FilterFeatures features;
  FilterLabel label = FilterLabel::Keep;
};

/// TSV/whitespace columns: src_len tgt_len unaligned conf one2one label.
std::vector<LabeledExample> load_labeled_examples(const std::string& path);

/// Gini impurity 1 - sum(p_i^2) of a two-class count pair. Total 0 is an
/// error.
double gini(std::size_t keep_count, std::size_t reject_count);

/// Greedy CART over the five features: candidate thresholds are midpoints of
/// consecutive distinct sorted values, the split minimizing weighted child
/// Gini wins, ties broken by (lower feature index, lower threshold). A node
/// becomes a leaf when pure, below min_samples_split, at max_depth, or when
/// no split keeps both children >= min_samples_leaf and strictly decreases
/// weighted Gini. Leaf label = majority class, ties -> reject.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // leaf when feature < 0
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    FilterLabel label = FilterLabel::Reject;
    std::size_t n_keep = 0;
    std::size_t n_reject = 0;

    bool is_leaf() const { return feature < 0; }
  };

  static DecisionTree train(const std::vector<LabeledExample>& examples,
                            int min_samples_split = 2, int min_samples_leaf = 1,
                            std::optional<int> max_depth = std::nullopt);

  /// Routes by value <= threshold -> left; returns the leaf label.
  FilterLabel classify(const FilterFeatures& features) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }

  // Nested JSON: internal {"feature", "feature_name", "threshold", "left",
  // "right"}, leaf {"label", "counts": {"keep", "reject"}}.
  std::string to_json() const;
  static DecisionTree from_json(const std::string& text);
  void save_json(const std::string& path) const;
  static DecisionTree load_json(const std::string& path);

 private:
  std::vector<Node> nodes_;  // nodes_[0] is the root
};

struct FilterReport {
  std::size_t kept = 0;
  std::size_t rejected = 0;
  std::array<double, FilterFeatures::kCount> kept_feature_mean{};
  std::array<double, FilterFeatures::kCount> rejected_feature_mean{};

  std::string to_text() const;
  std::string to_json() const;
};

/// Classifies every pair in the batch; keep_mask[i] preserves input order.
FilterReport filter_corpus(
    const std::vector<std::pair<SentencePair, AlignmentLinks>>& batch,
    const DecisionTree& tree, std::vector<bool>& keep_mask);

/// Incremental form for streaming callers (the CLI): feed classifications
/// one by one, then take the report.
class FilterReportBuilder {
 public:
  void record(const FilterFeatures& features, FilterLabel label);
  FilterReport finish() const;

 private:
  FilterReport report_;
  std::array<double, FilterFeatures::kCount> kept_sum_{};
  std::array<double, FilterFeatures::kCount> rejected_sum_{};
};

}  // namespace varigen
