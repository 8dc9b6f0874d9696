#include "juris/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "juris/error.hpp"
#include "juris/rng.hpp"
#include "juris/unicode.hpp"

namespace juris {

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  for (const auto& span : unicode::find_words(text)) {
    tokens.push_back(unicode::lowercase(text.substr(span.begin, span.end - span.begin)));
  }
  return tokens;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.value * e.value;
  return sum;
}

// ---- vocabulary -------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> sorted_terms, NgramRange range, std::size_t min_df)
    : terms_(std::move(sorted_terms)), range_(range), min_df_(min_df) {
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      throw Error(ErrorKind::Input, "vocabulary terms must be distinct and sorted");
    }
    index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
  }
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    out += terms_[i];
    out += '\t';
    out += std::to_string(i);
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::from_tsv(std::string_view text, NgramRange range, std::size_t min_df) {
  std::vector<std::string> terms;
  std::size_t offset = 0;
  while (offset < text.size()) {
    auto end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(offset, end - offset);
    if (!line.empty()) {
      const auto tab = line.rfind('\t');
      if (tab == std::string_view::npos) throw ParseError("vocabulary line lacks a tab", offset);
      const std::string index_text(line.substr(tab + 1));
      if (index_text != std::to_string(terms.size())) {
        throw ParseError("vocabulary indices must be dense and in order", offset + tab + 1);
      }
      terms.emplace_back(line.substr(0, tab));
    }
    offset = end + 1;
  }
  try {
    return Vocabulary(std::move(terms), range, min_df);
  } catch (const Error& e) {
    throw ParseError(e.what(), std::nullopt);
  }
}

std::uint64_t Vocabulary::hash() const { return fnv1a(to_tsv()); }

Vocabulary build_vocabulary(std::span<const TokenList> corpus, NgramRange range, std::size_t min_df) {
  if (corpus.empty()) throw Error(ErrorKind::Input, "cannot build a vocabulary from an empty corpus");
  if (range.min_n < 1 || range.max_n < range.min_n) {
    throw Error(ErrorKind::Config, "invalid n-gram range (" + std::to_string(range.min_n) + ", " +
                                       std::to_string(range.max_n) + ")");
  }
  std::unordered_map<std::string, std::size_t> df;
  std::unordered_set<std::string> seen;
  for (const auto& tokens : corpus) {
    seen.clear();
    for_each_ngram(tokens, range, [&](const std::string& gram) {
      if (seen.insert(gram).second) ++df[gram];
    });
  }
  std::vector<std::string> terms;
  for (auto& [term, count] : df) {
    if (count >= min_df) terms.push_back(term);
  }
  if (terms.empty()) {
    throw Error(ErrorKind::Config, "vocabulary is empty (min_df " + std::to_string(min_df) + ")");
  }
  std::sort(terms.begin(), terms.end());
  return Vocabulary(std::move(terms), range, min_df);
}

// ---- weighting --------------------------------------------------------------

const char* to_string(Weighting weighting) {
  return weighting == Weighting::Counts ? "counts" : "tfidf";
}

Weighting parse_weighting(std::string_view name) {
  if (name == "counts") return Weighting::Counts;
  if (name == "tfidf") return Weighting::TfIdf;
  throw Error(ErrorKind::Config, "unknown weighting '" + std::string(name) + "' (expected counts or tfidf)");
}

IdfWeights fit_idf(std::span<const SparseVector> vectors) {
  if (vectors.empty()) throw Error(ErrorKind::Input, "cannot fit IDF weights on an empty corpus");
  IdfWeights weights;
  weights.doc_count = vectors.size();
  std::vector<std::size_t> df(vectors.front().dims, 0);
  for (const auto& v : vectors) {
    for (const auto& e : v.entries) ++df.at(e.index);
  }
  const double n = static_cast<double>(weights.doc_count);
  weights.idf.reserve(df.size());
  for (const std::size_t d : df) {
    weights.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(d))) + 1.0);
  }
  return weights;
}

SparseVector vectorize(const TokenList& tokens, const Vocabulary& vocab, Weighting weighting,
                       const IdfWeights* idf) {
  if (weighting == Weighting::TfIdf && (idf == nullptr || idf->idf.size() != vocab.size())) {
    throw Error(ErrorKind::Input, "TF-IDF weighting requires IDF weights fitted on this vocabulary");
  }
  std::vector<std::uint32_t> hits;
  for_each_ngram(tokens, vocab.ngram_range(), [&](const std::string& gram) {
    if (auto index = vocab.index_of(gram)) hits.push_back(*index);
  });
  std::sort(hits.begin(), hits.end());

  SparseVector v;
  v.dims = vocab.size();
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    v.entries.push_back({hits[i], static_cast<double>(j - i)});
    i = j;
  }
  if (weighting == Weighting::TfIdf && !v.entries.empty()) {
    for (auto& e : v.entries) e.value *= idf->idf[e.index];
    const double norm = std::sqrt(v.squared_norm());
    for (auto& e : v.entries) e.value /= norm;
  }
  return v;
}

// ---- featurizer -------------------------------------------------------------

nlohmann::json to_json(const FeaturizerConfig& config) {
  return {{"ngram_min", config.ngrams.min_n},
          {"ngram_max", config.ngrams.max_n},
          {"min_df", config.min_df},
          {"weighting", to_string(config.weighting)}};
}

FeaturizerConfig featurizer_config_from_json(const nlohmann::json& j) {
  FeaturizerConfig config;
  try {
    config.ngrams.min_n = j.value("ngram_min", 1);
    config.ngrams.max_n = j.value("ngram_max", 2);
    config.min_df = j.value("min_df", std::size_t{2});
    config.weighting = parse_weighting(j.value("weighting", std::string("counts")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("invalid featurizer config: ") + e.what());
  }
  if (config.ngrams.min_n < 1 || config.ngrams.max_n < config.ngrams.min_n) {
    throw Error(ErrorKind::Config, "invalid n-gram range");
  }
  if (config.min_df < 1) throw Error(ErrorKind::Config, "min_df must be at least 1");
  return config;
}

Featurizer::Featurizer(FeaturizerConfig config, Vocabulary vocab, std::optional<IdfWeights> idf,
                       std::vector<std::string> fit_ids)
    : config_(config), vocab_(std::move(vocab)), idf_(std::move(idf)), fit_ids_(std::move(fit_ids)) {
  std::sort(fit_ids_.begin(), fit_ids_.end());
  if (config_.weighting == Weighting::TfIdf && (!idf_ || idf_->idf.size() != vocab_.size())) {
    throw Error(ErrorKind::Integrity, "TF-IDF featurizer lacks matching IDF weights");
  }
}

Featurizer Featurizer::fit(std::span<const TokenList> tokens, std::span<const std::string> ids,
                           const FeaturizerConfig& config) {
  if (tokens.size() != ids.size()) throw Error(ErrorKind::Input, "token lists and ids differ in length");
  Vocabulary vocab = build_vocabulary(tokens, config.ngrams, config.min_df);
  std::optional<IdfWeights> idf;
  if (config.weighting == Weighting::TfIdf) {
    std::vector<SparseVector> counts;
    counts.reserve(tokens.size());
    for (const auto& t : tokens) counts.push_back(vectorize(t, vocab, Weighting::Counts));
    idf = fit_idf(counts);
  }
  return Featurizer(config, std::move(vocab), std::move(idf), {ids.begin(), ids.end()});
}

SparseVector Featurizer::transform(const TokenList& tokens) const {
  if (!fitted()) throw Error(ErrorKind::State, "featurizer used before fitting");
  return vectorize(tokens, vocab_, config_.weighting, idf_ ? &*idf_ : nullptr);
}

bool Featurizer::disjoint_from(std::span<const std::string> ids) const {
  return std::none_of(ids.begin(), ids.end(), [&](const std::string& id) {
    return std::binary_search(fit_ids_.begin(), fit_ids_.end(), id);
  });
}

}  // namespace juris
