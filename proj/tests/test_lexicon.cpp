#include "doctest.h"

#include <algorithm>
#include <random>

#include "testutil.hpp"
#include "varigen/error.hpp"
#include "varigen/lexicon.hpp"
#include "varigen/mrpt.hpp"

using namespace varigen;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("load_lexicon_tsv") {
  TempDir tmp;
  SUBCASE("single entry with weight") {
    auto p = write_file(tmp.file("l.tsv"), "dog\tkalb\t3\n");
    auto lex = Lexicon::load_tsv(p);
    auto entries = lex.lookup("dog");
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].target == std::vector<std::string>{"kalb"});
    CHECK(entries[0].weight == 3.0);
  }
  SUBCASE("two lines for one source word sort by weight desc") {
    auto p = write_file(tmp.file("l.tsv"), "dog\tkalb\t1\ndog\tkalbe\t5\n");
    auto lex = Lexicon::load_tsv(p);
    auto entries = lex.lookup("dog");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].target == std::vector<std::string>{"kalbe"});
    CHECK(entries[1].target == std::vector<std::string>{"kalb"});
  }
  SUBCASE("missing weight defaults to 1") {
    auto p = write_file(tmp.file("l.tsv"), "dog\tkalb\n");
    CHECK(Lexicon::load_tsv(p).lookup("dog")[0].weight == 1.0);
  }
  SUBCASE("multi-word target") {
    auto p = write_file(tmp.file("l.tsv"), "doghouse\tbeit kalb\t2\n");
    CHECK(Lexicon::load_tsv(p).lookup("doghouse")[0].target ==
          std::vector<std::string>{"beit", "kalb"});
  }
  SUBCASE("empty target is an error") {
    auto p = write_file(tmp.file("l.tsv"), "dog\t\t1\n");
    CHECK_THROWS_WITH_AS(Lexicon::load_tsv(p), doctest::Contains("empty target"),
                         Error);
  }
  SUBCASE("non-numeric weight is an error") {
    auto p = write_file(tmp.file("l.tsv"), "dog\tkalb\tlots\n");
    CHECK_THROWS_WITH_AS(Lexicon::load_tsv(p), doctest::Contains("non-numeric"),
                         Error);
  }
  SUBCASE("weight ties sort lexicographically by target") {
    auto p = write_file(tmp.file("l.tsv"), "dog\tzz\t2\ndog\taa\t2\n");
    auto entries = Lexicon::load_tsv(p).lookup("dog");
    CHECK(entries[0].target == std::vector<std::string>{"aa"});
  }
}

TEST_CASE("lookup misses and case sensitivity") {
  TempDir tmp;
  auto p = write_file(tmp.file("l.tsv"), "dog\tkalb\t3\n");
  auto lex = Lexicon::load_tsv(p);
  CHECK(lex.lookup("cat").empty());
  CHECK(lex.lookup("Dog").empty());
}

TEST_CASE("save_tsv round-trips") {
  TempDir tmp;
  auto p = write_file(tmp.file("l.tsv"),
                      "dog\tkalb\t3\ncat\tqitta\t2\ndog\tbeit kalb\t7\n");
  auto lex = Lexicon::load_tsv(p);
  lex.save_tsv(tmp.file("out.tsv"));
  auto back = Lexicon::load_tsv(tmp.file("out.tsv"));
  CHECK(back.size() == lex.size());
  for (const auto& word : lex.source_words()) {
    auto a = lex.lookup(word);
    auto b = back.lookup(word);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].target == b[i].target);
      CHECK(a[i].weight == b[i].weight);
    }
  }
}

namespace {

std::vector<std::pair<SentencePair, AlignmentLinks>> seed_pair_repeated(int times) {
  SentencePair pair;
  pair.src_tokens = {"al", "kalb"};  // variant side
  pair.tgt_tokens = {"the", "dog"};
  pair.id = 1;
  AlignmentLinks links = parse_pharaoh("0-0 1-1", pair);
  std::vector<std::pair<SentencePair, AlignmentLinks>> out;
  for (int i = 0; i < times; ++i) out.emplace_back(pair, links);
  return out;
}

}  // namespace

TEST_CASE("induce_from_alignments hand-counted oracle") {
  SUBCASE("single pair, min_count 1") {
    VectorPairStream stream(seed_pair_repeated(1));
    auto lex = induce_from_alignments(stream, 1, VariantSide::Source);
    REQUIRE(lex.lookup("the").size() == 1);
    CHECK(lex.lookup("the")[0].target == std::vector<std::string>{"al"});
    CHECK(lex.lookup("the")[0].weight == 1.0);
    CHECK(lex.lookup("dog")[0].target == std::vector<std::string>{"kalb"});
  }
  SUBCASE("repeated 3x with min_count 2: counts are 3, all kept") {
    VectorPairStream stream(seed_pair_repeated(3));
    auto lex = induce_from_alignments(stream, 2, VariantSide::Source);
    CHECK(lex.lookup("the")[0].weight == 3.0);
    CHECK(lex.lookup("dog")[0].weight == 3.0);
  }
  SUBCASE("min_count 5 drops everything") {
    VectorPairStream stream(seed_pair_repeated(3));
    auto lex = induce_from_alignments(stream, 5, VariantSide::Source);
    CHECK(lex.size() == 0);
  }
}

TEST_CASE("induce_from_alignments composes contiguous groups only") {
  SentencePair pair;
  pair.src_tokens = {"beit", "kalb", "x"};
  pair.tgt_tokens = {"doghouse", "y"};
  pair.id = 1;
  SUBCASE("contiguous one-to-many becomes a multi-word entry") {
    auto links = parse_pharaoh("0-0 1-0", pair);
    VectorPairStream stream({{pair, links}});
    auto lex = induce_from_alignments(stream, 1, VariantSide::Source);
    CHECK(lex.lookup("doghouse")[0].target ==
          std::vector<std::string>{"beit", "kalb"});
  }
  SUBCASE("non-contiguous group is discarded") {
    auto links = parse_pharaoh("0-0 2-0", pair);
    VectorPairStream stream({{pair, links}});
    auto lex = induce_from_alignments(stream, 1, VariantSide::Source);
    CHECK(lex.lookup("doghouse").empty());
  }
}

TEST_CASE("induce_from_alignments with the variant on the target side") {
  SentencePair pair;
  pair.src_tokens = {"the", "dog"};       // lexicon-source side
  pair.tgt_tokens = {"al", "kalb"};       // variant side
  pair.id = 1;
  auto links = parse_pharaoh("0-0 1-1", pair);
  VectorPairStream stream({{pair, links}});
  auto lex = induce_from_alignments(stream, 1, VariantSide::Target);
  CHECK(lex.lookup("dog")[0].target == std::vector<std::string>{"kalb"});
}

TEST_CASE("induce_from_alignments is permutation-invariant") {
  SentencePair a, b;
  a.src_tokens = {"al", "kalb"};
  a.tgt_tokens = {"the", "dog"};
  a.id = 1;
  b.src_tokens = {"qitta"};
  b.tgt_tokens = {"cat"};
  b.id = 2;
  auto la = parse_pharaoh("0-0 1-1", a);
  auto lb = parse_pharaoh("0-0", b);

  std::vector<std::pair<SentencePair, AlignmentLinks>> fwd{{a, la}, {b, lb}, {a, la}};
  std::vector<std::pair<SentencePair, AlignmentLinks>> rev{{b, lb}, {a, la}, {a, la}};
  VectorPairStream s1(fwd), s2(rev);
  auto l1 = induce_from_alignments(s1, 1, VariantSide::Source);
  auto l2 = induce_from_alignments(s2, 1, VariantSide::Source);
  CHECK(l1.source_words() == l2.source_words());
  for (const auto& w : l1.source_words()) {
    REQUIRE(l1.lookup(w).size() == l2.lookup(w).size());
    for (std::size_t i = 0; i < l1.lookup(w).size(); ++i) {
      CHECK(l1.lookup(w)[i].target == l2.lookup(w)[i].target);
      CHECK(l1.lookup(w)[i].weight == l2.lookup(w)[i].weight);
    }
  }
}

TEST_CASE("raising min_count never adds entries") {
  std::mt19937_64 rng(11);
  std::vector<std::pair<SentencePair, AlignmentLinks>> corpus;
  for (int i = 0; i < 40; ++i) {
    SentencePair pair;
    const int len = 1 + static_cast<int>(rng() % 4);
    for (int t = 0; t < len; ++t) {
      pair.src_tokens.push_back("v" + std::to_string(rng() % 6));
      pair.tgt_tokens.push_back("e" + std::to_string(rng() % 6));
    }
    pair.id = static_cast<std::size_t>(i + 1);
    std::string align;
    for (int t = 0; t < len; ++t)
      align += std::to_string(t) + "-" + std::to_string(t) + " ";
    corpus.emplace_back(pair, parse_pharaoh(align, pair));
  }
  std::vector<std::string> prev_words;
  for (int mc = 1; mc <= 4; ++mc) {
    VectorPairStream stream(corpus);
    auto lex = induce_from_alignments(stream, mc, VariantSide::Source);
    auto words = lex.source_words();
    if (mc > 1) {
      for (const auto& w : words)
        CHECK(std::find(prev_words.begin(), prev_words.end(), w) !=
              prev_words.end());
    }
    prev_words = words;
  }
}

TEST_CASE("map_via_bilingual_embedding") {
  EmbeddingTable joint(2, "joint");
  joint.add("en:dog", std::vector<double>{1, 0});
  joint.add("f:kalb", std::vector<double>{1, 0});
  joint.add("en:cat", std::vector<double>{0, 1});
  joint.add("f:qitta", std::vector<double>{0, 1});

  SUBCASE("identical vectors map at distance 0") {
    auto mapped = map_via_bilingual_embedding("dog", joint, nullptr, "en:", "f:", 4);
    REQUIRE(mapped.has_value());
    CHECK(*mapped == "kalb");
  }
  SUBCASE("absent word maps to nothing") {
    CHECK_FALSE(
        map_via_bilingual_embedding("bird", joint, nullptr, "en:", "f:", 4));
  }
  SUBCASE("k too small to reach any target-tagged word") {
    // crafted table: every nearest neighbor within k=2 carries the en: prefix
    EmbeddingTable crowded(2, "joint");
    crowded.add("en:dog", std::vector<double>{1.0, 0.0});
    crowded.add("en:hound", std::vector<double>{1.01, 0.0});
    crowded.add("en:puppy", std::vector<double>{0.99, 0.0});
    crowded.add("f:kalb", std::vector<double>{5.0, 0.0});
    CHECK_FALSE(
        map_via_bilingual_embedding("dog", crowded, nullptr, "en:", "f:", 2));
    CHECK(map_via_bilingual_embedding("dog", crowded, nullptr, "en:", "f:", 4) ==
          std::optional<std::string>("kalb"));
  }
}

TEST_CASE("induce_from_bilingual_embedding backend") {
  EmbeddingTable joint(2, "joint");
  joint.add("en:dog", std::vector<double>{1, 0});
  joint.add("f:kalb", std::vector<double>{0.9, 0.1});
  joint.add("en:cat", std::vector<double>{0, 1});
  joint.add("f:qitta", std::vector<double>{0.1, 0.9});
  auto lex = induce_from_bilingual_embedding(joint, nullptr, "en:", "f:", 4);
  REQUIRE(lex.lookup("dog").size() == 1);
  CHECK(lex.lookup("dog")[0].target == std::vector<std::string>{"kalb"});
  CHECK(lex.lookup("dog")[0].weight ==
        doctest::Approx(cosine_similarity(joint.vector("en:dog"),
                                          joint.vector("f:kalb"))));
  CHECK(lex.lookup("cat")[0].target == std::vector<std::string>{"qitta"});
}
