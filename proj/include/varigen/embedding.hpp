#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace varigen {

using ConstVecView = Eigen::Map<const Eigen::VectorXd>;

/// Immutable-after-load store of dense word vectors for one embedding space.
/// Entries keep file order; duplicate words are overwritten in place (last
/// occurrence wins) and counted. Safe for concurrent reads once loaded.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim, std::string space_label = "");

  // word2vec text format: header "<count> <dim>", then one
  // "<word> <v1> ... <v_dim>" row per line. Words are UTF-8 and may not
  // contain whitespace.
  static EmbeddingTable load_word2vec_text(const std::string& path,
                                           std::string space_label = "");
  void save_word2vec_text(const std::string& path) const;

  void add(const std::string& word, std::span<const double> vec);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  const std::string& space_label() const { return space_label_; }
  std::size_t duplicates_seen() const { return duplicates_; }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }
  std::optional<std::size_t> find(const std::string& word) const;
  const std::string& word(std::size_t i) const { return words_[i]; }

  ConstVecView view(std::size_t i) const {
    return ConstVecView(data_.data() + i * dim_,
                        static_cast<Eigen::Index>(dim_));
  }
  /// Throws if the word is absent.
  ConstVecView vector(const std::string& word) const;

 private:
  std::size_t dim_;
  std::string space_label_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> data_;
  std::size_t duplicates_ = 0;
};

/// dot(u,v) / (|u||v|), clamped to [-1,1]. Zero-norm input is an error,
/// never a silent 0.
double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v);

/// Componentwise sum of the words' vectors. Every word must be present.
Eigen::VectorXd compose_additive(const std::vector<std::string>& words,
                                 const EmbeddingTable& table);

}  // namespace varigen
