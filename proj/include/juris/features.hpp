#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace juris {

using TokenList = std::vector<std::string>;

/// Lowercased maximal letter/digit runs; apostrophes split French elision.
TokenList tokenize(std::string_view text);

struct NgramRange {
  int min_n = 1;
  int max_n = 2;
  bool operator==(const NgramRange&) const = default;
};

/// Sorted sparse vector with strictly increasing indices and no stored zeros.
struct SparseVector {
  struct Entry {
    std::uint32_t index;
    double value;
    bool operator==(const Entry&) const = default;
  };

  std::size_t dims = 0;
  std::vector<Entry> entries;

  double squared_norm() const;
  bool operator==(const SparseVector&) const = default;
};

/// Calls fn(ngram) for every n-gram of `tokens` in the range; n-gram words
/// are joined by a single space.
template <typename Fn>
void for_each_ngram(const TokenList& tokens, NgramRange range, Fn&& fn) {
  std::string gram;
  for (int n = range.min_n; n <= range.max_n; ++n) {
    const auto width = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
      gram = tokens[i];
      for (std::size_t k = 1; k < width; ++k) {
        gram += ' ';
        gram += tokens[i + k];
      }
      fn(gram);
    }
  }
}

class Vocabulary {
 public:
  Vocabulary() = default;

  /// Terms sorted lexicographically; index i is the i-th term.
  Vocabulary(std::vector<std::string> sorted_terms, NgramRange range, std::size_t min_df);

  std::optional<std::uint32_t> index_of(std::string_view term) const;
  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  NgramRange ngram_range() const { return range_; }
  std::size_t min_df() const { return min_df_; }

  /// `term<TAB>index` per line.
  std::string to_tsv() const;
  static Vocabulary from_tsv(std::string_view text, NgramRange range, std::size_t min_df);

  /// FNV-1a of to_tsv(); ties persisted models to the vocabulary they used.
  std::uint64_t hash() const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint32_t> index_;
  NgramRange range_;
  std::size_t min_df_ = 1;
};

/// Every n-gram with document frequency >= min_df. Must only be given
/// training documents. Throws Error(Config) for an empty result or an
/// invalid range, Error(Input) for an empty corpus.
Vocabulary build_vocabulary(std::span<const TokenList> corpus, NgramRange range, std::size_t min_df);

enum class Weighting { Counts, TfIdf };

const char* to_string(Weighting weighting);
Weighting parse_weighting(std::string_view name);

struct IdfWeights {
  std::vector<double> idf;
  std::size_t doc_count = 0;
};

/// idf(t) = ln((1 + N) / (1 + df(t))) + 1. Throws Error(Input) when empty.
IdfWeights fit_idf(std::span<const SparseVector> vectors);

/// Counts: raw term frequencies. TfIdf: tf * idf, L2-normalized.
/// Out-of-vocabulary n-grams are dropped. Throws Error(Input) if TfIdf is
/// requested without idf weights.
SparseVector vectorize(const TokenList& tokens, const Vocabulary& vocab, Weighting weighting,
                       const IdfWeights* idf = nullptr);

struct FeaturizerConfig {
  NgramRange ngrams;
  std::size_t min_df = 2;
  Weighting weighting = Weighting::Counts;
  bool operator==(const FeaturizerConfig&) const = default;
};

nlohmann::json to_json(const FeaturizerConfig& config);
FeaturizerConfig featurizer_config_from_json(const nlohmann::json& j);

/// Vocabulary plus optional IDF weights, remembering which documents it was
/// fitted on so evaluation can prove test documents never reached it.
class Featurizer {
 public:
  Featurizer() = default;
  Featurizer(FeaturizerConfig config, Vocabulary vocab, std::optional<IdfWeights> idf,
             std::vector<std::string> fit_ids = {});

  static Featurizer fit(std::span<const TokenList> tokens, std::span<const std::string> ids,
                        const FeaturizerConfig& config);

  SparseVector transform(const TokenList& tokens) const;

  const FeaturizerConfig& config() const { return config_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const std::optional<IdfWeights>& idf() const { return idf_; }
  std::size_t dims() const { return vocab_.size(); }
  bool fitted() const { return vocab_.size() > 0; }

  /// Sorted ids of the documents used for fitting.
  const std::vector<std::string>& fit_ids() const { return fit_ids_; }
  /// True when none of `ids` was used for fitting.
  bool disjoint_from(std::span<const std::string> ids) const;

 private:
  FeaturizerConfig config_;
  Vocabulary vocab_;
  std::optional<IdfWeights> idf_;
  std::vector<std::string> fit_ids_;
};

}  // namespace juris
