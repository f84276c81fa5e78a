#include "varigen/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "varigen/embedding.hpp"
#include "varigen/error.hpp"
#include "varigen/mrpt.hpp"
#include "varigen/text.hpp"

namespace varigen {

namespace {

bool entry_order(const LexiconEntry& a, const LexiconEntry& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.target < b.target;  // lexicographic on the token sequence
}

}  // namespace

void Lexicon::add(const std::string& src, std::vector<std::string> target,
                  double weight) {
  if (src.empty()) fail("lexicon: empty source word");
  if (target.empty()) fail("lexicon: empty target sequence for '" + src + "'");
  entries_[src].push_back({std::move(target), weight});
}

void Lexicon::finalize() {
  for (auto& [_, list] : entries_) std::sort(list.begin(), list.end(), entry_order);
}

std::span<const LexiconEntry> Lexicon::lookup(const std::string& word) const {
  auto it = entries_.find(word);
  if (it == entries_.end()) return {};
  return it->second;
}

std::vector<std::string> Lexicon::source_words() const {
  std::vector<std::string> words;
  words.reserve(entries_.size());
  for (const auto& [w, _] : entries_) words.push_back(w);
  std::sort(words.begin(), words.end());
  return words;
}

Lexicon Lexicon::load_tsv(const std::string& path, std::string direction_label) {
  std::ifstream in(path);
  if (!in) fail("cannot open lexicon file: " + path);
  Lexicon lex(std::move(direction_label));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_tabs(line);
    auto bad = [&](const std::string& why) -> void {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": " << why;
      fail(msg.str());
    };
    if (fields.size() != 2 && fields.size() != 3)
      bad("expected 'src<TAB>tgt_seq[<TAB>weight]'");
    if (trim(fields[0]).empty()) bad("empty source word");
    auto target = split_whitespace(fields[1]);
    if (target.empty()) bad("empty target sequence");
    double weight = 1.0;
    if (fields.size() == 3 && !parse_double(trim(fields[2]), weight))
      bad("non-numeric weight '" + fields[2] + "'");
    lex.add(fields[0], std::move(target), weight);
  }
  lex.finalize();
  return lex;
}

void Lexicon::save_tsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail("cannot open for writing: " + path);
  out.precision(17);
  for (const auto& word : source_words())
    for (const auto& entry : lookup(word))
      out << word << '\t' << join(entry.target) << '\t' << entry.weight << '\n';
  if (!out) fail("write failed: " + path);
}

Lexicon induce_from_alignments(PairAlignmentStream& stream, int min_count,
                               VariantSide variant_side,
                               std::string direction_label) {
  if (min_count < 1) fail("induce_from_alignments: min_count must be >= 1");

  // source word -> target sequence -> count; std::map keys keep the final
  // sort deterministic regardless of stream order.
  std::map<std::string, std::map<std::vector<std::string>, std::size_t>> counts;

  SentencePair pair;
  AlignmentLinks links;
  while (stream.next(pair, links)) {
    const bool variant_is_src = variant_side == VariantSide::Source;
    const auto& lexicon_words = variant_is_src ? pair.tgt_tokens : pair.src_tokens;
    const auto& variant_words = variant_is_src ? pair.src_tokens : pair.tgt_tokens;
    for (int pos = 0; pos < static_cast<int>(lexicon_words.size()); ++pos) {
      std::vector<int> group = variant_is_src ? groups_for_target(links, pos)
                                              : groups_for_source(links, pos);
      if (group.empty()) continue;
      // only contiguous one-to-many groups form a phrase
      if (group.back() - group.front() + 1 != static_cast<int>(group.size()))
        continue;
      std::vector<std::string> seq;
      seq.reserve(group.size());
      for (int g : group) seq.push_back(variant_words[static_cast<std::size_t>(g)]);
      ++counts[lexicon_words[static_cast<std::size_t>(pos)]][std::move(seq)];
    }
  }

  Lexicon lex(std::move(direction_label));
  for (auto& [word, seqs] : counts)
    for (auto& [seq, count] : seqs)
      if (count >= static_cast<std::size_t>(min_count))
        lex.add(word, seq, static_cast<double>(count));
  lex.finalize();
  return lex;
}

std::optional<std::string> map_via_bilingual_embedding(
    const std::string& word, const EmbeddingTable& joint, const MrptIndex* index,
    const std::string& source_prefix, const std::string& target_prefix, int k,
    int votes) {
  auto idx = joint.find(source_prefix + word);
  if (!idx) return std::nullopt;
  const Eigen::VectorXd q = joint.view(*idx);
  KnnResult result = index ? index->query(q, k, votes) : exact_knn(joint, q, k);
  for (const auto& [neighbor, _] : result.neighbors)
    if (neighbor.starts_with(target_prefix))
      return neighbor.substr(target_prefix.size());
  return std::nullopt;
}

Lexicon induce_from_bilingual_embedding(const EmbeddingTable& joint,
                                        const MrptIndex* index,
                                        const std::string& source_prefix,
                                        const std::string& target_prefix, int k,
                                        int votes, std::string direction_label) {
  Lexicon lex(std::move(direction_label));
  for (std::size_t i = 0; i < joint.size(); ++i) {
    const std::string& tagged = joint.word(i);
    if (!tagged.starts_with(source_prefix)) continue;
    const std::string bare = tagged.substr(source_prefix.size());
    auto mapped = map_via_bilingual_embedding(bare, joint, index, source_prefix,
                                              target_prefix, k, votes);
    if (!mapped) continue;
    const double weight =
        cosine_similarity(joint.view(i), joint.vector(target_prefix + *mapped));
    lex.add(bare, {*mapped}, weight);
  }
  lex.finalize();
  return lex;
}

}  // namespace varigen
