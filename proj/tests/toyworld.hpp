#pragma once

// Synthetic three-language world shared by the generator tests and the
// acceptance suite: a target space E, a variant space that is an exact
// rotation of E, and a mixed space where each source word s{i} and variant
// word v{i} are near-parallel, so the mixed-space cosine argmax for s{i} is
// v{i}. A lexicon covers a fraction of the target vocabulary with e{i}->v{i}.

#include <Eigen/Core>
#include <Eigen/QR>

#include <random>
#include <string>
#include <vector>

#include "varigen/alignment.hpp"
#include "varigen/embedding.hpp"
#include "varigen/lexicon.hpp"

namespace toyworld {

struct World {
  varigen::EmbeddingTable target;
  varigen::EmbeddingTable variant;
  varigen::EmbeddingTable mixed;
  varigen::Lexicon lexicon;
  Eigen::MatrixXd rotation;
  int vocab = 0;

  static std::string target_word(int i) { return "e" + std::to_string(i); }
  static std::string variant_word(int i) { return "v" + std::to_string(i); }
  static std::string source_word(int i) { return "s" + std::to_string(i); }

  // Row-vector convention: the variant vector of word i is e_i * R.
  Eigen::VectorXd rotate(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    return rotation.transpose() * v;
  }
};

inline Eigen::MatrixXd random_rotation(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = gauss(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
}

// coverage: fraction of target words present in the lexicon (every
// round(1/coverage)-th word).
inline World make_world(int vocab, int dim, double coverage,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  World world{varigen::EmbeddingTable(static_cast<std::size_t>(dim), "target"),
              varigen::EmbeddingTable(static_cast<std::size_t>(dim), "variant"),
              varigen::EmbeddingTable(static_cast<std::size_t>(dim), "mixed"),
              varigen::Lexicon("target->variant"),
              Eigen::MatrixXd(),
              vocab};
  world.rotation = random_rotation(dim, rng);

  std::vector<double> buf(static_cast<std::size_t>(dim));
  const int stride = std::max(1, static_cast<int>(std::lround(1.0 / coverage)));
  for (int i = 0; i < vocab; ++i) {
    Eigen::VectorXd e(dim);
    for (int c = 0; c < dim; ++c) e(c) = gauss(rng);
    Eigen::VectorXd v = world.rotate(e);

    Eigen::Map<Eigen::VectorXd>(buf.data(), dim) = e;
    world.target.add(World::target_word(i), buf);
    Eigen::Map<Eigen::VectorXd>(buf.data(), dim) = v;
    world.variant.add(World::variant_word(i), buf);

    // mixed space: v{i} is a slightly perturbed copy of s{i}
    Eigen::VectorXd g(dim);
    for (int c = 0; c < dim; ++c) g(c) = gauss(rng);
    Eigen::Map<Eigen::VectorXd>(buf.data(), dim) = g;
    world.mixed.add(World::source_word(i), buf);
    Eigen::VectorXd g2 = g;
    for (int c = 0; c < dim; ++c) g2(c) += 0.01 * gauss(rng);
    Eigen::Map<Eigen::VectorXd>(buf.data(), dim) = g2;
    world.mixed.add(World::variant_word(i), buf);

    if (i % stride == 0)
      world.lexicon.add(World::target_word(i), {World::variant_word(i)}, 1.0);
  }
  world.lexicon.finalize();
  return world;
}

// Sentence over word ids: source s{id}..., target e{id}..., diagonal links.
inline std::pair<varigen::SentencePair, varigen::AlignmentLinks> make_sentence(
    const std::vector<int>& ids, std::size_t sentence_id) {
  varigen::SentencePair pair;
  pair.id = sentence_id;
  std::string align;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    pair.src_tokens.push_back(World::source_word(ids[t]));
    pair.tgt_tokens.push_back(World::target_word(ids[t]));
    if (t) align += ' ';
    align += std::to_string(t) + "-" + std::to_string(t);
  }
  return {pair, varigen::parse_pharaoh(align, pair)};
}

// The exhaustive scoring oracle: argmax over every variant-vocabulary word
// of cosine(mixed vector, mixed composition of the aligned source words),
// ties by word ascending. Mirrors the ranking math, independent of the
// neighbor-search path.
inline std::string oracle_argmax(const World& world,
                                 const std::vector<std::string>& aligned_src) {
  Eigen::VectorXd sum =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(world.mixed.dim()));
  for (const auto& s : aligned_src)
    if (auto id = world.mixed.find(s)) sum += world.mixed.view(*id);
  std::string best;
  double best_score = -2.0;
  for (int i = 0; i < world.vocab; ++i) {
    const std::string word = World::variant_word(i);
    const auto id = world.mixed.find(word);
    if (!id) continue;
    const double score = varigen::cosine_similarity(world.mixed.view(*id), sum);
    if (score > best_score || (score == best_score && word < best)) {
      best_score = score;
      best = word;
    }
  }
  return best;
}

}  // namespace toyworld
