#pragma once

#include <cstdint>
#include <string>

namespace varigen {

/// Flat "section.key = value" config file. Unknown keys are a hard error.
/// Flags passed on the command line override file values.
struct PipelineConfig {
  // embeddings
  std::string emb_target;
  std::string emb_variant;
  std::string emb_mixed;
  std::string emb_joint;
  // corpus (two files or one TSV) + alignments
  std::string corpus_src;
  std::string corpus_tgt;
  std::string corpus_tsv;
  std::string corpus_alignments;
  // lexicon
  std::string lex_path;
  int lex_min_count = 2;
  // token lists, one per line
  std::string lists_stopwords;
  std::string lists_named_entities;
  // output
  std::string out_dir;
  // generation
  int gen_k = 200;
  int gen_n = 3;
  int gen_m = 5;
  int gen_max_retries = 1;
  int gen_anchor_cap = 40;
  int gen_workers = 1;
  std::int64_t gen_seed = 42;
  // approximate search
  int ann_trees = 32;
  int ann_leaf_size = 128;
  int ann_votes = 2;
  bool ann_exact = false;  // bypass the index, brute-force every query
  std::string ann_target_index;
  std::string ann_variant_index;
  // corpus filter
  int filter_min_samples_split = 2;
  int filter_min_samples_leaf = 1;
  int filter_max_depth = 0;  // 0 = unlimited

  static PipelineConfig load(const std::string& path);
  /// Throws ConfigError on unknown key or unparsable value.
  void set(const std::string& key, const std::string& value);
  /// Resolved key = value listing, one per line (the --dry-run plan).
  std::string dump() const;
};

}  // namespace varigen
