#include "varigen/alignment.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "varigen/error.hpp"
#include "varigen/text.hpp"

namespace varigen {

AlignmentLinks parse_pharaoh(const std::string& line, const SentencePair& pair) {
  const int src_len = static_cast<int>(pair.src_tokens.size());
  const int tgt_len = static_cast<int>(pair.tgt_tokens.size());

  struct Parsed {
    int src, tgt;
    double conf;
    bool has_conf;
  };
  std::vector<Parsed> parsed;
  for (const auto& token : split_whitespace(line)) {
    auto bad = [&](const std::string& why) -> void {
      std::ostringstream msg;
      msg << "alignment token '" << token << "' " << why << " (pair " << pair.id
          << ")";
      fail(msg.str());
    };
    std::string_view tv(token);
    std::size_t dash = tv.find('-');
    if (dash == std::string_view::npos) bad("is not of the form i-j");
    std::size_t slash = tv.find('/', dash + 1);
    long long i = 0, j = 0;
    if (!parse_long(tv.substr(0, dash), i)) bad("has a non-integer source index");
    std::string_view jpart = slash == std::string_view::npos
                                 ? tv.substr(dash + 1)
                                 : tv.substr(dash + 1, slash - dash - 1);
    if (!parse_long(jpart, j)) bad("has a non-integer target index");
    double conf = 0.0;
    bool has_conf = slash != std::string_view::npos;
    if (has_conf) {
      if (!parse_double(tv.substr(slash + 1), conf) || conf < 0.0 || conf > 1.0)
        bad("has a confidence outside [0,1]");
    }
    if (i < 0 || i >= src_len) {
      std::ostringstream msg;
      msg << "src index " << i << " >= " << src_len << " (pair " << pair.id << ")";
      fail(msg.str());
    }
    if (j < 0 || j >= tgt_len) {
      std::ostringstream msg;
      msg << "tgt index " << j << " >= " << tgt_len << " (pair " << pair.id << ")";
      fail(msg.str());
    }
    parsed.push_back({static_cast<int>(i), static_cast<int>(j), conf, has_conf});
  }

  for (std::size_t i = 1; i < parsed.size(); ++i)
    if (parsed[i].has_conf != parsed[0].has_conf) {
      std::ostringstream msg;
      msg << "mixed presence of link confidences (pair " << pair.id << ")";
      fail(msg.str());
    }

  std::stable_sort(parsed.begin(), parsed.end(), [](const Parsed& a, const Parsed& b) {
    return std::pair(a.src, a.tgt) < std::pair(b.src, b.tgt);
  });
  for (std::size_t i = 1; i < parsed.size(); ++i)
    if (parsed[i].src == parsed[i - 1].src && parsed[i].tgt == parsed[i - 1].tgt) {
      std::ostringstream msg;
      msg << "duplicate link " << parsed[i].src << "-" << parsed[i].tgt
          << " (pair " << pair.id << ")";
      fail(msg.str());
    }

  AlignmentLinks out;
  out.links.reserve(parsed.size());
  for (const auto& p : parsed) out.links.emplace_back(p.src, p.tgt);
  if (!parsed.empty() && parsed[0].has_conf) {
    out.confidences.reserve(parsed.size());
    for (const auto& p : parsed) out.confidences.push_back(p.conf);
  }
  return out;
}

std::vector<int> groups_for_target(const AlignmentLinks& links, int tgt_index) {
  std::vector<int> out;
  for (const auto& [s, t] : links.links)
    if (t == tgt_index) out.push_back(s);
  // links are sorted by (src, tgt), so out is already ascending
  return out;
}

std::vector<int> groups_for_source(const AlignmentLinks& links, int src_index) {
  std::vector<int> out;
  for (const auto& [s, t] : links.links)
    if (s == src_index) out.push_back(t);
  return out;
}

AlignmentStats alignment_stats(const SentencePair& pair,
                               const AlignmentLinks& links) {
  const std::size_t src_len = pair.src_tokens.size();
  const std::size_t tgt_len = pair.tgt_tokens.size();

  std::vector<int> src_degree(src_len, 0), tgt_degree(tgt_len, 0);
  for (const auto& [s, t] : links.links) {
    ++src_degree[static_cast<std::size_t>(s)];
    ++tgt_degree[static_cast<std::size_t>(t)];
  }
  const auto unaligned = [](const std::vector<int>& deg) {
    return static_cast<std::size_t>(
        std::count(deg.begin(), deg.end(), 0));
  };

  AlignmentStats stats;
  stats.unaligned_fraction =
      static_cast<double>(unaligned(src_degree) + unaligned(tgt_degree)) /
      static_cast<double>(src_len + tgt_len);

  if (!links.links.empty()) {
    std::size_t one_to_one = 0;
    for (const auto& [s, t] : links.links)
      if (src_degree[static_cast<std::size_t>(s)] == 1 &&
          tgt_degree[static_cast<std::size_t>(t)] == 1)
        ++one_to_one;
    stats.one_to_one_fraction =
        static_cast<double>(one_to_one) / static_cast<double>(links.links.size());
  }

  const double max_len = static_cast<double>(std::max(src_len, tgt_len));
  if (links.has_confidences())
    stats.mean_confidence =
        std::accumulate(links.confidences.begin(), links.confidences.end(), 0.0) /
        max_len;
  else
    stats.mean_confidence = static_cast<double>(links.links.size()) / max_len;
  return stats;
}

// ---------------------------------------------------------------------------
// corpus readers

struct ParallelCorpusReader::Impl {
  bool tsv_mode = false;
  std::ifstream src, tgt, tsv;
  std::string src_path, tgt_path, tsv_path;
  std::size_t line_no = 0;
};

ParallelCorpusReader::ParallelCorpusReader() : impl_(new Impl) {}
ParallelCorpusReader::~ParallelCorpusReader() = default;
ParallelCorpusReader::ParallelCorpusReader(ParallelCorpusReader&&) noexcept = default;
ParallelCorpusReader& ParallelCorpusReader::operator=(ParallelCorpusReader&&) noexcept =
    default;

ParallelCorpusReader ParallelCorpusReader::open_two_files(
    const std::string& src_path, const std::string& tgt_path) {
  ParallelCorpusReader r;
  r.impl_->src.open(src_path);
  if (!r.impl_->src) fail("cannot open corpus file: " + src_path);
  r.impl_->tgt.open(tgt_path);
  if (!r.impl_->tgt) fail("cannot open corpus file: " + tgt_path);
  r.impl_->src_path = src_path;
  r.impl_->tgt_path = tgt_path;
  return r;
}

ParallelCorpusReader ParallelCorpusReader::open_tsv(const std::string& path) {
  ParallelCorpusReader r;
  r.impl_->tsv_mode = true;
  r.impl_->tsv.open(path);
  if (!r.impl_->tsv) fail("cannot open corpus file: " + path);
  r.impl_->tsv_path = path;
  return r;
}

bool ParallelCorpusReader::next(SentencePair& out) {
  Impl& im = *impl_;
  ++im.line_no;
  if (im.tsv_mode) {
    std::string line;
    if (!std::getline(im.tsv, line)) return false;
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      std::ostringstream msg;
      msg << im.tsv_path << ":" << im.line_no << ": expected 2 tab-separated columns, got "
          << fields.size();
      fail(msg.str());
    }
    out.src_tokens = split_whitespace(fields[0]);
    out.tgt_tokens = split_whitespace(fields[1]);
    if (out.src_tokens.empty() || out.tgt_tokens.empty()) {
      std::ostringstream msg;
      msg << im.tsv_path << ":" << im.line_no << ": empty sentence";
      fail(msg.str());
    }
    out.id = im.line_no;
    return true;
  }

  std::string src_line, tgt_line;
  const bool got_src = static_cast<bool>(std::getline(im.src, src_line));
  const bool got_tgt = static_cast<bool>(std::getline(im.tgt, tgt_line));
  if (!got_src && !got_tgt) return false;
  if (got_src != got_tgt) {
    std::ostringstream msg;
    msg << "corpus files differ in line count ('" << im.src_path << "' vs '"
        << im.tgt_path << "', at line " << im.line_no << ")";
    fail(msg.str());
  }
  out.src_tokens = split_whitespace(src_line);
  out.tgt_tokens = split_whitespace(tgt_line);
  if (out.src_tokens.empty() || out.tgt_tokens.empty()) {
    std::ostringstream msg;
    msg << (out.src_tokens.empty() ? im.src_path : im.tgt_path) << ":" << im.line_no
        << ": empty sentence";
    fail(msg.str());
  }
  out.id = im.line_no;
  return true;
}

struct FilePairStream::Impl {
  ParallelCorpusReader corpus;
  std::ifstream align;
  std::string align_path;
  std::size_t align_line_no = 0;

  explicit Impl(ParallelCorpusReader c) : corpus(std::move(c)) {}
};

FilePairStream::FilePairStream(ParallelCorpusReader corpus,
                               const std::string& align_path)
    : impl_(new Impl(std::move(corpus))) {
  impl_->align.open(align_path);
  if (!impl_->align) fail("cannot open alignment file: " + align_path);
  impl_->align_path = align_path;
}

FilePairStream::~FilePairStream() = default;

bool FilePairStream::next(SentencePair& pair, AlignmentLinks& links) {
  std::string align_line;
  const bool got_pair = impl_->corpus.next(pair);
  const bool got_align = static_cast<bool>(std::getline(impl_->align, align_line));
  ++impl_->align_line_no;
  if (!got_pair && !got_align) return false;
  if (got_pair != got_align)
    fail("alignment file '" + impl_->align_path +
         "' and corpus differ in line count (at line " +
         std::to_string(impl_->align_line_no) + ")");
  links = parse_pharaoh(align_line, pair);
  return true;
}

}  // namespace varigen
