#include "varigen/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "varigen/error.hpp"
#include "varigen/text.hpp"

namespace varigen {

EmbeddingTable::EmbeddingTable(std::size_t dim, std::string space_label)
    : dim_(dim), space_label_(std::move(space_label)) {
  if (dim_ == 0) fail("embedding dimension must be positive");
}

void EmbeddingTable::add(const std::string& word, std::span<const double> vec) {
  if (vec.size() != dim_) {
    std::ostringstream msg;
    msg << "vector for '" << word << "' has " << vec.size()
        << " components, expected " << dim_;
    fail(msg.str());
  }
  for (double v : vec)
    if (!std::isfinite(v)) fail("non-finite component in vector for '" + word + "'");
  auto it = index_.find(word);
  if (it != index_.end()) {
    std::copy(vec.begin(), vec.end(), data_.begin() + it->second * dim_);
    ++duplicates_;
    return;
  }
  index_.emplace(word, words_.size());
  words_.push_back(word);
  data_.insert(data_.end(), vec.begin(), vec.end());
}

std::optional<std::size_t> EmbeddingTable::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ConstVecView EmbeddingTable::vector(const std::string& word) const {
  auto i = find(word);
  if (!i) fail("word '" + word + "' not in embedding table '" + space_label_ + "'");
  return view(*i);
}

namespace {

[[noreturn]] void fail_at(const std::string& path, std::size_t line_no,
                          const std::string& msg) {
  std::ostringstream s;
  s << path << ":" << line_no << ": " << msg;
  fail(s.str());
}

}  // namespace

EmbeddingTable EmbeddingTable::load_word2vec_text(const std::string& path,
                                                  std::string space_label) {
  std::ifstream in(path);
  if (!in) fail("cannot open embedding file: " + path);

  std::string line;
  if (!std::getline(in, line))
    fail_at(path, 1, "empty file, expected '<count> <dim>' header");
  auto header = split_whitespace(line);
  long long count = 0, dim = 0;
  if (header.size() != 2 || !parse_long(header[0], count) ||
      !parse_long(header[1], dim) || count < 0 || dim <= 0)
    fail_at(path, 1, "malformed header '" + line +
                         "', expected '<count> <dim>'");

  EmbeddingTable table(static_cast<std::size_t>(dim), std::move(space_label));
  table.words_.reserve(static_cast<std::size_t>(count));
  table.data_.reserve(static_cast<std::size_t>(count * dim));

  std::vector<double> buf(static_cast<std::size_t>(dim));
  long long rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      if (rows == count) continue;  // tolerate trailing blank lines
      fail_at(path, line_no, "blank line inside vector block");
    }
    if (rows == count)
      fail_at(path, line_no,
              "more rows than the header declared (" + std::to_string(count) + ")");
    auto tokens = split_whitespace(line);
    if (tokens.size() != static_cast<std::size_t>(dim) + 1) {
      std::ostringstream msg;
      msg << "row has " << (tokens.size() - 1) << " components, expected " << dim;
      fail_at(path, line_no, msg.str());
    }
    for (std::size_t c = 0; c < buf.size(); ++c) {
      if (!parse_double(tokens[c + 1], buf[c]))
        fail_at(path, line_no, "non-numeric component '" + tokens[c + 1] + "'");
      if (!std::isfinite(buf[c]))
        fail_at(path, line_no, "non-finite component '" + tokens[c + 1] + "'");
    }
    table.add(tokens[0], buf);
    ++rows;
  }
  if (rows != count) {
    std::ostringstream msg;
    msg << "header declared " << count << " rows, file has " << rows;
    fail_at(path, line_no + 1, msg.str());
  }
  if (table.duplicates_ > 0)
    std::cerr << "warning: " << path << ": " << table.duplicates_
              << " duplicate word(s), last occurrence kept\n";
  return table;
}

void EmbeddingTable::save_word2vec_text(const std::string& path) const {
  std::ofstream out(path);
  if (!out) fail("cannot open for writing: " + path);
  out.precision(17);  // exact double round-trip
  out << size() << ' ' << dim_ << '\n';
  for (std::size_t i = 0; i < size(); ++i) {
    out << words_[i];
    for (std::size_t c = 0; c < dim_; ++c) out << ' ' << data_[i * dim_ + c];
    out << '\n';
  }
  if (!out) fail("write failed: " + path);
}

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) fail("cosine similarity: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0)
    fail("cosine similarity undefined for a zero-norm vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

Eigen::VectorXd compose_additive(const std::vector<std::string>& words,
                                 const EmbeddingTable& table) {
  if (words.empty()) fail("compose_additive: empty word list");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table.dim()));
  for (const auto& w : words) sum += table.vector(w);
  return sum;
}

}  // namespace varigen
