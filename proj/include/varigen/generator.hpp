#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "varigen/alignment.hpp"
#include "varigen/embedding.hpp"
#include "varigen/lexicon.hpp"
#include "varigen/mrpt.hpp"

namespace varigen {

struct GenerationConfig {
  int k = 200;           // initial neighbor count
  int n = 3;             // candidate count in the variant space
  int m = 5;             // minimum lexicon-covered neighbors
  int max_retries = 1;   // k-doubling attempts
  int anchor_cap = 40;   // max anchors used for the local projection
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> named_entities;
  std::uint64_t seed = 42;

  /// Throws ConfigError unless k >= m >= 1, n >= 1, max_retries >= 0,
  /// anchor_cap >= 1.
  void validate() const;
};

enum class Outcome {
  Substituted,
  SkippedStopword,
  SkippedNamedEntity,
  SkippedUnaligned,
  SkippedNoCoverage,
  SkippedNoCandidates,
};
inline constexpr std::size_t kOutcomeCount = 6;
const char* outcome_name(Outcome outcome);

struct SubstitutionRecord {
  int tgt_index = 0;
  std::vector<int> src_indices;  // aligned source positions, ascending
  std::optional<std::vector<std::string>> chosen;  // iff Substituted
  Outcome outcome = Outcome::SkippedUnaligned;
  // (candidate word, mixed-space cosine), ranked best first. Candidates
  // absent from the mixed table carry -inf.
  std::vector<std::pair<std::string, double>> candidate_scores;
};

struct ThreeWayRecord {
  std::vector<std::string> src_tokens;      // unchanged input source side
  std::vector<std::string> variant_tokens;  // source side after substitution
  std::vector<std::string> tgt_tokens;      // unchanged input target side
  std::vector<SubstitutionRecord> records;  // one per target position
};

/// One searchable embedding space. A null index means exact search.
struct Space {
  const EmbeddingTable* table = nullptr;
  const MrptIndex* index = nullptr;
  int votes = 1;

  KnnResult knn(const Eigen::Ref<const Eigen::VectorXd>& q, int k) const;
};

struct GenerationSpaces {
  Space target;                          // space of the corpus target side
  Space variant;                         // space of the variant language
  const EmbeddingTable* mixed = nullptr; // joint source/variant space

  /// Throws ConfigError when the three spaces disagree on dimension.
  void validate() const;
};

/// The per-word substitution decision:
///  1. stopword / named-entity screens (either side),
///  2. aligned source group lookup,
///  3. k-NN in the target space, retrying with doubled k until at least m
///     neighbors are lexicon-covered,
///  4. local projection fitted from covered neighbors (up to anchor_cap),
///  5. n nearest candidates around the projected point in the variant space,
///  6. candidates ranked by mixed-space cosine against the additive
///     composition of the aligned source words.
/// A target word missing from the target table is demoted to
/// skipped_no_coverage (no vector, so no covered neighbors).
SubstitutionRecord substitute_word(int tgt_index, const SentencePair& pair,
                                   const AlignmentLinks& links,
                                   const GenerationSpaces& spaces,
                                   const Lexicon& lexicon,
                                   const GenerationConfig& config);

/// Splices chosen sequences into the source sentence. Records whose source
/// span is non-contiguous or overlaps an earlier substitution are demoted to
/// skipped_no_candidates (first-come wins). Demotion clears `chosen`.
std::vector<std::string> apply_substitutions(
    const std::vector<std::string>& src_tokens,
    std::vector<SubstitutionRecord>& records);

ThreeWayRecord generate_sentence(const SentencePair& pair,
                                 const AlignmentLinks& links,
                                 const GenerationSpaces& spaces,
                                 const Lexicon& lexicon,
                                 const GenerationConfig& config);

struct GenerationReport {
  std::size_t sentences = 0;
  std::size_t target_tokens = 0;
  std::array<std::size_t, kOutcomeCount> outcome_counts{};
  double substitution_rate = 0.0;  // substituted / target tokens
  double wall_seconds = 0.0;

  std::string to_text() const;
  std::string to_json() const;
};

/// Runs generate_sentence over the stream with `workers` threads (sentences
/// are independent; output order is the input order, so parallel and serial
/// runs produce identical bytes). Writes the three-way TSV
/// "src \t variant \t tgt" and a records side channel, one line per
/// substitution record.
GenerationReport generate_corpus(PairAlignmentStream& stream,
                                 const GenerationSpaces& spaces,
                                 const Lexicon& lexicon,
                                 const GenerationConfig& config,
                                 const std::string& out_tsv_path,
                                 const std::string& out_records_path,
                                 int workers = 1);

}  // namespace varigen
