#include "varigen/generator.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "varigen/error.hpp"
#include "varigen/projection.hpp"
#include "varigen/text.hpp"

namespace varigen {

void GenerationConfig::validate() const {
  if (m < 1) throw ConfigError("gen.m must be >= 1");
  if (k < m) throw ConfigError("gen.k must be >= gen.m");
  if (n < 1) throw ConfigError("gen.n must be >= 1");
  if (max_retries < 0) throw ConfigError("gen.max_retries must be >= 0");
  if (anchor_cap < 1) throw ConfigError("gen.anchor_cap must be >= 1");
}

const char* outcome_name(Outcome outcome) {
  switch (outcome) {
    case Outcome::Substituted: return "substituted";
    case Outcome::SkippedStopword: return "skipped_stopword";
    case Outcome::SkippedNamedEntity: return "skipped_named_entity";
    case Outcome::SkippedUnaligned: return "skipped_unaligned";
    case Outcome::SkippedNoCoverage: return "skipped_no_coverage";
    case Outcome::SkippedNoCandidates: return "skipped_no_candidates";
  }
  return "?";
}

KnnResult Space::knn(const Eigen::Ref<const Eigen::VectorXd>& q, int k) const {
  return index ? index->query(q, k, votes) : exact_knn(*table, q, k);
}

void GenerationSpaces::validate() const {
  if (!target.table || !variant.table || !mixed)
    throw ConfigError("generation spaces: all three embedding tables are required");
  if (target.table->dim() != variant.table->dim() ||
      target.table->dim() != mixed->dim()) {
    std::ostringstream msg;
    msg << "embedding spaces disagree on dimension (target " << target.table->dim()
        << ", variant " << variant.table->dim() << ", mixed " << mixed->dim() << ")";
    throw ConfigError(msg.str());
  }
  if (target.index && &target.index->table() != target.table)
    throw ConfigError("target index was built over a different table");
  if (variant.index && &variant.index->table() != variant.table)
    throw ConfigError("variant index was built over a different table");
}

SubstitutionRecord substitute_word(int tgt_index, const SentencePair& pair,
                                   const AlignmentLinks& links,
                                   const GenerationSpaces& spaces,
                                   const Lexicon& lexicon,
                                   const GenerationConfig& config) {
  SubstitutionRecord rec;
  rec.tgt_index = tgt_index;
  rec.src_indices = groups_for_target(links, tgt_index);
  const std::string& word = pair.tgt_tokens[static_cast<std::size_t>(tgt_index)];

  // 1. word-level screens
  if (config.stopwords.count(word)) {
    rec.outcome = Outcome::SkippedStopword;
    return rec;
  }
  bool named_entity = config.named_entities.count(word) != 0;
  for (int s : rec.src_indices)
    named_entity = named_entity ||
                   config.named_entities.count(
                       pair.src_tokens[static_cast<std::size_t>(s)]) != 0;
  if (named_entity) {
    rec.outcome = Outcome::SkippedNamedEntity;
    return rec;
  }

  // 2. aligned source group
  if (rec.src_indices.empty()) {
    rec.outcome = Outcome::SkippedUnaligned;
    return rec;
  }

  // 3. neighbors in the target space, doubling k until at least m are
  // lexicon-covered. A word without a vector has no neighbors at all.
  const auto target_id = spaces.target.table->find(word);
  if (!target_id) {
    rec.outcome = Outcome::SkippedNoCoverage;
    return rec;
  }
  const Eigen::VectorXd query = spaces.target.table->view(*target_id);

  std::vector<std::string> covered;  // ascending distance
  for (int attempt = 0, k = config.k;; ++attempt, k *= 2) {
    covered.clear();
    const KnnResult neighbors = spaces.target.knn(query, k);
    for (const auto& [neighbor, _] : neighbors.neighbors)
      if (!lexicon.lookup(neighbor).empty()) covered.push_back(neighbor);
    if (static_cast<int>(covered.size()) >= config.m) break;
    if (attempt == config.max_retries) {
      rec.outcome = Outcome::SkippedNoCoverage;
      return rec;
    }
  }

  // 4. anchors: covered neighbor vector -> composed vector of its
  // top-weighted translation, capped at anchor_cap. Translations that
  // cannot be composed in the variant space are dropped.
  const Eigen::Index dim = static_cast<Eigen::Index>(spaces.target.table->dim());
  std::vector<Eigen::VectorXd> anchor_src, anchor_tgt;
  for (const auto& neighbor : covered) {
    if (static_cast<int>(anchor_src.size()) >= config.anchor_cap) break;
    const LexiconEntry& entry = lexicon.lookup(neighbor).front();
    Eigen::VectorXd composed = Eigen::VectorXd::Zero(dim);
    bool ok = true;
    for (const auto& token : entry.target) {
      const auto id = spaces.variant.table->find(token);
      if (!id) {
        ok = false;
        break;
      }
      composed += spaces.variant.table->view(*id);
    }
    if (!ok) continue;
    anchor_src.emplace_back(spaces.target.table->vector(neighbor));
    anchor_tgt.emplace_back(std::move(composed));
  }
  if (anchor_src.empty()) {
    rec.outcome = Outcome::SkippedNoCoverage;
    return rec;
  }

  AnchorPairs anchors;
  anchors.source.resize(static_cast<Eigen::Index>(anchor_src.size()), dim);
  anchors.target.resize(static_cast<Eigen::Index>(anchor_tgt.size()), dim);
  for (std::size_t i = 0; i < anchor_src.size(); ++i) {
    anchors.source.row(static_cast<Eigen::Index>(i)) = anchor_src[i];
    anchors.target.row(static_cast<Eigen::Index>(i)) = anchor_tgt[i];
  }

  // 5. project and fetch candidates around the projected point
  const ProjectionMatrix local =
      fit_projection(anchors, default_ridge(anchors.source));
  const Eigen::VectorXd projected = project(query, local);
  const KnnResult candidates = spaces.variant.knn(projected, config.n);
  if (candidates.neighbors.empty()) {
    rec.outcome = Outcome::SkippedNoCandidates;
    return rec;
  }

  // 6. rank candidates by mixed-space cosine against the additive
  // composition of the aligned source words (missing words dropped).
  Eigen::VectorXd aligned_sum = Eigen::VectorXd::Zero(dim);
  bool any_present = false;
  for (int s : rec.src_indices) {
    const auto id =
        spaces.mixed->find(pair.src_tokens[static_cast<std::size_t>(s)]);
    if (!id) continue;
    aligned_sum += spaces.mixed->view(*id);
    any_present = true;
  }
  if (!any_present || aligned_sum.norm() == 0.0) {
    rec.outcome = Outcome::SkippedNoCandidates;
    return rec;
  }

  constexpr double kNoScore = -std::numeric_limits<double>::infinity();
  rec.candidate_scores.reserve(candidates.neighbors.size());
  for (const auto& [candidate, _] : candidates.neighbors) {
    const auto id = spaces.mixed->find(candidate);
    double score = kNoScore;
    if (id && spaces.mixed->view(*id).norm() != 0.0)
      score = cosine_similarity(spaces.mixed->view(*id), aligned_sum);
    rec.candidate_scores.emplace_back(candidate, score);
  }
  // stable: equal scores keep the candidates' distance order
  std::stable_sort(rec.candidate_scores.begin(), rec.candidate_scores.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  rec.chosen = std::vector<std::string>{rec.candidate_scores.front().first};
  rec.outcome = Outcome::Substituted;
  return rec;
}

std::vector<std::string> apply_substitutions(
    const std::vector<std::string>& src_tokens,
    std::vector<SubstitutionRecord>& records) {
  const std::size_t src_len = src_tokens.size();
  std::vector<bool> consumed(src_len, false);
  std::unordered_map<int, const SubstitutionRecord*> span_front;

  for (auto& rec : records) {
    if (rec.outcome != Outcome::Substituted) continue;
    const auto& span = rec.src_indices;
    const bool contiguous =
        !span.empty() &&
        span.back() - span.front() + 1 == static_cast<int>(span.size());
    bool free = contiguous;
    if (contiguous)
      for (int s : span) free = free && !consumed[static_cast<std::size_t>(s)];
    if (!free) {
      // non-contiguous span, or it overlaps an earlier substitution
      rec.outcome = Outcome::SkippedNoCandidates;
      rec.chosen.reset();
      continue;
    }
    for (int s : span) consumed[static_cast<std::size_t>(s)] = true;
    span_front.emplace(span.front(), &rec);
  }

  std::vector<std::string> out;
  out.reserve(src_len);
  for (std::size_t pos = 0; pos < src_len; ++pos) {
    auto it = span_front.find(static_cast<int>(pos));
    if (it != span_front.end()) {
      for (const auto& token : *it->second->chosen) out.push_back(token);
    } else if (!consumed[pos]) {
      out.push_back(src_tokens[pos]);
    }
  }
  return out;
}

ThreeWayRecord generate_sentence(const SentencePair& pair,
                                 const AlignmentLinks& links,
                                 const GenerationSpaces& spaces,
                                 const Lexicon& lexicon,
                                 const GenerationConfig& config) {
  ThreeWayRecord out;
  out.src_tokens = pair.src_tokens;
  out.tgt_tokens = pair.tgt_tokens;
  out.records.reserve(pair.tgt_tokens.size());
  for (int t = 0; t < static_cast<int>(pair.tgt_tokens.size()); ++t)
    out.records.push_back(
        substitute_word(t, pair, links, spaces, lexicon, config));
  out.variant_tokens = apply_substitutions(pair.src_tokens, out.records);
  return out;
}

namespace {

// Runs fn(0..count) on `workers` threads; any exception is rethrown on the
// caller once all threads joined.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int thread_count =
      static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  pool.reserve(static_cast<std::size_t>(thread_count));
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void write_record_line(std::ostream& out, std::size_t sentence_id,
                       const SubstitutionRecord& rec) {
  out << "sent=" << sentence_id << "\ttgt=" << rec.tgt_index
      << "\toutcome=" << outcome_name(rec.outcome) << "\tsrc=";
  for (std::size_t i = 0; i < rec.src_indices.size(); ++i) {
    if (i) out << ',';
    out << rec.src_indices[i];
  }
  out << "\tchosen=";
  if (rec.chosen) out << join(*rec.chosen);
  out << "\tscores=";
  for (std::size_t i = 0; i < rec.candidate_scores.size(); ++i) {
    if (i) out << ',';
    out << rec.candidate_scores[i].first << ':'
        << rec.candidate_scores[i].second;
  }
  out << '\n';
}

}  // namespace

GenerationReport generate_corpus(PairAlignmentStream& stream,
                                 const GenerationSpaces& spaces,
                                 const Lexicon& lexicon,
                                 const GenerationConfig& config,
                                 const std::string& out_tsv_path,
                                 const std::string& out_records_path,
                                 int workers) {
  spaces.validate();
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  std::ofstream tsv(out_tsv_path);
  if (!tsv) fail("cannot open for writing: " + out_tsv_path);
  std::ofstream records(out_records_path);
  if (!records) fail("cannot open for writing: " + out_records_path);
  records.precision(9);

  GenerationReport report;
  constexpr std::size_t kChunk = 512;
  std::vector<std::pair<SentencePair, AlignmentLinks>> batch;
  std::vector<ThreeWayRecord> results;

  for (;;) {
    batch.clear();
    SentencePair pair;
    AlignmentLinks links;
    while (batch.size() < kChunk && stream.next(pair, links))
      batch.emplace_back(pair, links);
    if (batch.empty()) break;

    results.assign(batch.size(), {});
    parallel_for(batch.size(), workers, [&](std::size_t i) {
      results[i] = generate_sentence(batch[i].first, batch[i].second, spaces,
                                     lexicon, config);
    });

    for (std::size_t i = 0; i < batch.size(); ++i) {
      const ThreeWayRecord& r = results[i];
      tsv << join(r.src_tokens) << '\t' << join(r.variant_tokens) << '\t'
          << join(r.tgt_tokens) << '\n';
      for (const auto& rec : r.records) {
        write_record_line(records, batch[i].first.id, rec);
        ++report.outcome_counts[static_cast<std::size_t>(rec.outcome)];
      }
      report.target_tokens += r.records.size();
      ++report.sentences;
    }
  }
  if (!tsv || !records) fail("write failed while generating");

  if (report.target_tokens > 0)
    report.substitution_rate =
        static_cast<double>(
            report.outcome_counts[static_cast<std::size_t>(Outcome::Substituted)]) /
        static_cast<double>(report.target_tokens);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

std::string GenerationReport::to_text() const {
  std::ostringstream out;
  out << "sentences            " << sentences << "\n"
      << "target tokens        " << target_tokens << "\n";
  for (std::size_t i = 0; i < kOutcomeCount; ++i)
    out << std::left << std::setw(21) << outcome_name(static_cast<Outcome>(i))
        << outcome_counts[i] << "\n";
  out << "substitution rate    " << std::fixed << std::setprecision(4)
      << substitution_rate << "\n"
      << "wall time            " << std::setprecision(2) << wall_seconds
      << " s\n";
  return out.str();
}

std::string GenerationReport::to_json() const {
  nlohmann::ordered_json j;
  j["sentences"] = sentences;
  j["target_tokens"] = target_tokens;
  for (std::size_t i = 0; i < kOutcomeCount; ++i)
    j["outcomes"][outcome_name(static_cast<Outcome>(i))] = outcome_counts[i];
  j["substitution_rate"] = substitution_rate;
  j["wall_seconds"] = wall_seconds;
  return j.dump(2);
}

}  // namespace varigen
