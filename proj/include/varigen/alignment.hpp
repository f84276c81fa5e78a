#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace varigen {

struct SentencePair {
  std::vector<std::string> src_tokens;
  std::vector<std::string> tgt_tokens;
  std::size_t id = 0;  // 1-based line number
};

struct AlignmentLinks {
  // (src_index, tgt_index), sorted ascending, unique.
  std::vector<std::pair<int, int>> links;
  // Parallel to links; empty when the line carried no confidences.
  std::vector<double> confidences;

  bool has_confidences() const { return !confidences.empty(); }
};

/// Parses one Pharaoh line: whitespace-separated "i-j" or "i-j/p" tokens,
/// zero-based, p in [0,1]. Confidences must be present on all links or none.
AlignmentLinks parse_pharaoh(const std::string& line, const SentencePair& pair);

/// Source positions linked to tgt_index, ascending. Possibly empty.
std::vector<int> groups_for_target(const AlignmentLinks& links, int tgt_index);
/// Target positions linked to src_index, ascending.
std::vector<int> groups_for_source(const AlignmentLinks& links, int src_index);

struct AlignmentStats {
  double unaligned_fraction = 0.0;
  double one_to_one_fraction = 0.0;
  double mean_confidence = 0.0;
};

// unaligned_fraction: (unaligned src + unaligned tgt) / (src_len + tgt_len).
// one_to_one_fraction: links whose src and tgt each appear in exactly one
// link, over all links (0 if no links).
// mean_confidence: sum of confidences / max(src_len, tgt_len) when present,
// else |links| / max(src_len, tgt_len).
AlignmentStats alignment_stats(const SentencePair& pair,
                               const AlignmentLinks& links);

/// Reads a parallel corpus: two line-aligned files or one two-column TSV.
/// Sentences are whitespace-tokenized; empty sides are an error.
class ParallelCorpusReader {
 public:
  static ParallelCorpusReader open_two_files(const std::string& src_path,
                                             const std::string& tgt_path);
  static ParallelCorpusReader open_tsv(const std::string& path);
  ~ParallelCorpusReader();
  ParallelCorpusReader(ParallelCorpusReader&&) noexcept;
  ParallelCorpusReader& operator=(ParallelCorpusReader&&) noexcept;

  /// False on clean EOF; throws on length mismatch or malformed line.
  bool next(SentencePair& out);

 private:
  ParallelCorpusReader();
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// A stream of sentence pairs with their parsed alignments.
struct PairAlignmentStream {
  virtual ~PairAlignmentStream() = default;
  virtual bool next(SentencePair& pair, AlignmentLinks& links) = 0;
};

/// Pairs a corpus reader with a Pharaoh alignment file, one line per pair.
class FilePairStream final : public PairAlignmentStream {
 public:
  FilePairStream(ParallelCorpusReader corpus, const std::string& align_path);
  ~FilePairStream() override;
  bool next(SentencePair& pair, AlignmentLinks& links) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// In-memory stream, mainly for tests.
class VectorPairStream final : public PairAlignmentStream {
 public:
  explicit VectorPairStream(
      std::vector<std::pair<SentencePair, AlignmentLinks>> items)
      : items_(std::move(items)) {}
  bool next(SentencePair& pair, AlignmentLinks& links) override {
    if (pos_ >= items_.size()) return false;
    pair = items_[pos_].first;
    links = items_[pos_].second;
    ++pos_;
    return true;
  }

 private:
  std::vector<std::pair<SentencePair, AlignmentLinks>> items_;
  std::size_t pos_ = 0;
};

}  // namespace varigen
