#include "varigen/pipeline_config.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "varigen/error.hpp"
#include "varigen/text.hpp"

namespace varigen {

namespace {

struct Key {
  const char* name;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

void expect_int(const std::string& key, const std::string& value, long long& out) {
  if (!parse_long(value, out))
    throw ConfigError("config key '" + key + "': expected an integer, got '" +
                      value + "'");
}

const std::vector<Key>& keys() {
  auto str = [](std::string PipelineConfig::* field) {
    return Key{
        "", [field](PipelineConfig& c, const std::string& v) { c.*field = v; },
        [field](const PipelineConfig& c) { return c.*field; }};
  };
  auto num = [](auto PipelineConfig::* field) {
    return Key{"",
               [field](PipelineConfig& c, const std::string& v) {
                 long long parsed = 0;
                 expect_int("", v, parsed);
                 c.*field = static_cast<std::decay_t<decltype(c.*field)>>(parsed);
               },
               [field](const PipelineConfig& c) {
                 return std::to_string(c.*field);
               }};
  };
  auto flag = [](bool PipelineConfig::* field) {
    return Key{"",
               [field](PipelineConfig& c, const std::string& v) {
                 if (v == "true" || v == "1")
                   c.*field = true;
                 else if (v == "false" || v == "0")
                   c.*field = false;
                 else
                   throw ConfigError("expected true/false, got '" + v + "'");
               },
               [field](const PipelineConfig& c) {
                 return c.*field ? std::string("true") : std::string("false");
               }};
  };
  auto named = [](const char* name, Key k) {
    k.name = name;
    return k;
  };

  static const std::vector<Key> table = {
      named("emb.target", str(&PipelineConfig::emb_target)),
      named("emb.variant", str(&PipelineConfig::emb_variant)),
      named("emb.mixed", str(&PipelineConfig::emb_mixed)),
      named("emb.joint", str(&PipelineConfig::emb_joint)),
      named("corpus.src", str(&PipelineConfig::corpus_src)),
      named("corpus.tgt", str(&PipelineConfig::corpus_tgt)),
      named("corpus.tsv", str(&PipelineConfig::corpus_tsv)),
      named("corpus.alignments", str(&PipelineConfig::corpus_alignments)),
      named("lex.path", str(&PipelineConfig::lex_path)),
      named("lex.min_count", num(&PipelineConfig::lex_min_count)),
      named("lists.stopwords", str(&PipelineConfig::lists_stopwords)),
      named("lists.named_entities", str(&PipelineConfig::lists_named_entities)),
      named("out.dir", str(&PipelineConfig::out_dir)),
      named("gen.k", num(&PipelineConfig::gen_k)),
      named("gen.n", num(&PipelineConfig::gen_n)),
      named("gen.m", num(&PipelineConfig::gen_m)),
      named("gen.max_retries", num(&PipelineConfig::gen_max_retries)),
      named("gen.anchor_cap", num(&PipelineConfig::gen_anchor_cap)),
      named("gen.workers", num(&PipelineConfig::gen_workers)),
      named("gen.seed", num(&PipelineConfig::gen_seed)),
      named("ann.trees", num(&PipelineConfig::ann_trees)),
      named("ann.leaf_size", num(&PipelineConfig::ann_leaf_size)),
      named("ann.votes", num(&PipelineConfig::ann_votes)),
      named("ann.exact", flag(&PipelineConfig::ann_exact)),
      named("ann.target_index", str(&PipelineConfig::ann_target_index)),
      named("ann.variant_index", str(&PipelineConfig::ann_variant_index)),
      named("filter.min_samples_split",
            num(&PipelineConfig::filter_min_samples_split)),
      named("filter.min_samples_leaf",
            num(&PipelineConfig::filter_min_samples_leaf)),
      named("filter.max_depth", num(&PipelineConfig::filter_max_depth)),
  };
  return table;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  for (const Key& k : keys()) {
    if (key == k.name) {
      try {
        k.set(*this, value);
      } catch (const ConfigError&) {
        throw ConfigError("config key '" + key + "': bad value '" + value + "'");
      }
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view trimmed = trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key(trim(trimmed.substr(0, eq)));
    const std::string value(trim(trimmed.substr(eq + 1)));
    try {
      cfg.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

std::string PipelineConfig::dump() const {
  std::ostringstream out;
  for (const Key& k : keys()) out << k.name << " = " << k.get(*this) << "\n";
  return out.str();
}

}  // namespace varigen
