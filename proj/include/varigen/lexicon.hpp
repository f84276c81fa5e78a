#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "varigen/alignment.hpp"

namespace varigen {

class EmbeddingTable;
class MrptIndex;

struct LexiconEntry {
  std::vector<std::string> target;  // nonempty word sequence
  double weight = 1.0;
};

/// Seed bilingual dictionary: source word -> target sequences, each list
/// sorted by descending weight, ties by target sequence. Matching is
/// case-sensitive. Immutable once built; concurrent reads are safe.
class Lexicon {
 public:
  explicit Lexicon(std::string direction_label = "")
      : direction_label_(std::move(direction_label)) {}

  // TSV: "src<TAB>tgt_seq<TAB>weight?". tgt_seq may contain spaces
  // (multi-word); a missing weight defaults to 1.0.
  static Lexicon load_tsv(const std::string& path,
                          std::string direction_label = "");
  void save_tsv(const std::string& path) const;

  void add(const std::string& src, std::vector<std::string> target,
           double weight);
  /// Re-sorts every entry list (weight desc, target asc). add() calls do not
  /// keep the order; call this once after a batch of adds.
  void finalize();

  std::span<const LexiconEntry> lookup(const std::string& word) const;
  std::size_t size() const { return entries_.size(); }
  const std::string& direction_label() const { return direction_label_; }
  /// Source words in sorted order (the save order).
  std::vector<std::string> source_words() const;

 private:
  std::string direction_label_;
  std::unordered_map<std::string, std::vector<LexiconEntry>> entries_;
};

/// Which side of the seed corpus holds the variant language.
enum class VariantSide { Source, Target };

/// Counts, over the stream, the variant-side word group aligned to each
/// non-variant-side word. Only contiguous groups are kept; entries with
/// count < min_count are dropped. Weight = count.
Lexicon induce_from_alignments(PairAlignmentStream& stream, int min_count,
                               VariantSide variant_side,
                               std::string direction_label = "");

/// Joint-bilingual-embedding lookup: nearest target_prefix-tagged neighbor
/// of source_prefix+word among the k nearest (prefix stripped), or nullopt.
/// A null index means exact search.
std::optional<std::string> map_via_bilingual_embedding(
    const std::string& word, const EmbeddingTable& joint,
    const MrptIndex* index, const std::string& source_prefix,
    const std::string& target_prefix, int k, int votes = 1);

/// Lexicon backend over a joint bilingual embedding: single-word entries,
/// weight = cosine similarity between the paired vectors.
Lexicon induce_from_bilingual_embedding(const EmbeddingTable& joint,
                                        const MrptIndex* index,
                                        const std::string& source_prefix,
                                        const std::string& target_prefix,
                                        int k, int votes = 1,
                                        std::string direction_label = "");

}  // namespace varigen
