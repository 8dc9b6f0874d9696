#include <doctest.h>

#include <cmath>

#include "juris/error.hpp"
#include "juris/features.hpp"

using namespace juris;

namespace {

std::vector<TokenList> corpus(std::initializer_list<const char*> docs) {
  std::vector<TokenList> out;
  for (const char* d : docs) out.push_back(tokenize(d));
  return out;
}

}  // namespace

TEST_CASE("tokenize lowercases and splits elisions") {
  CHECK(tokenize("La Cour casse") == TokenList{"la", "cour", "casse"});
  CHECK(tokenize("l'arrêt attaqué") == TokenList{"l", "arrêt", "attaqué"});
  CHECK(tokenize("").empty());
}

TEST_CASE("vocabulary enumeration and df threshold") {
  const auto docs = corpus({"a b", "a c"});
  const auto v1 = build_vocabulary(docs, {1, 1}, 1);
  CHECK(v1.terms() == std::vector<std::string>{"a", "b", "c"});
  CHECK(v1.index_of("c") == 2u);
  const auto v2 = build_vocabulary(docs, {1, 2}, 2);
  CHECK(v2.terms() == std::vector<std::string>{"a"});
  const auto v3 = build_vocabulary(corpus({"a b"}), {2, 2}, 1);
  CHECK(v3.terms() == std::vector<std::string>{"a b"});
  CHECK_FALSE(v3.index_of("a").has_value());
}

TEST_CASE("document frequency counts each document once") {
  // "a" is frequent but appears in a single document
  CHECK_THROWS_AS(build_vocabulary(corpus({"a a a", "b"}), {1, 1}, 2), Error);
  CHECK(build_vocabulary(corpus({"a a a", "a b"}), {1, 1}, 2).terms() == std::vector<std::string>{"a"});
}

TEST_CASE("vocabulary errors") {
  CHECK_THROWS_AS(build_vocabulary({}, {1, 1}, 1), Error);
  CHECK_THROWS_AS(build_vocabulary(corpus({"a"}), {2, 1}, 1), Error);
  CHECK_THROWS_AS(build_vocabulary(corpus({"a"}), {0, 1}, 1), Error);
}

TEST_CASE("counts vectorization") {
  const Vocabulary vocab({"a", "b"}, {1, 1}, 1);
  const auto v = vectorize(TokenList{"a", "a", "b"}, vocab, Weighting::Counts);
  REQUIRE(v.entries.size() == 2);
  CHECK(v.entries[0] == SparseVector::Entry{0, 2.0});
  CHECK(v.entries[1] == SparseVector::Entry{1, 1.0});
  CHECK(v.dims == 2);
  CHECK(vectorize(TokenList{"z"}, vocab, Weighting::Counts).entries.empty());
}

TEST_CASE("tfidf singleton normalizes to one") {
  const Vocabulary vocab({"a"}, {1, 1}, 1);
  const IdfWeights idf{{1.0}, 1};
  const auto v = vectorize(TokenList{"a"}, vocab, Weighting::TfIdf, &idf);
  REQUIRE(v.entries.size() == 1);
  CHECK(v.entries[0].value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("tfidf vectors have unit norm") {
  const auto docs = corpus({"a b b c", "a c", "b d d d", "a"});
  const auto vocab = build_vocabulary(docs, {1, 2}, 1);
  std::vector<SparseVector> counts;
  for (const auto& d : docs) counts.push_back(vectorize(d, vocab, Weighting::Counts));
  const auto idf = fit_idf(counts);
  for (const auto& d : docs) {
    const auto v = vectorize(d, vocab, Weighting::TfIdf, &idf);
    CHECK(v.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("idf formula values") {
  // ten documents over a two-term vocabulary: term 0 everywhere, term 1 once
  std::vector<SparseVector> vectors(10);
  for (std::size_t i = 0; i < 10; ++i) {
    vectors[i].dims = 2;
    vectors[i].entries.push_back({0, 1.0});
    if (i == 3) vectors[i].entries.push_back({1, 4.0});
  }
  const auto idf = fit_idf(vectors);
  CHECK(idf.doc_count == 10);
  CHECK(idf.idf[0] == doctest::Approx(1.0).epsilon(1e-15));
  // frozen reference: 1 + ln(5.5)
  CHECK(idf.idf[1] == doctest::Approx(2.7047480922384253).epsilon(1e-14));

  std::vector<SparseVector> single(1);
  single[0].dims = 1;
  single[0].entries.push_back({0, 1.0});
  CHECK(fit_idf(single).idf[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_idf(std::vector<SparseVector>{}), Error);
}

TEST_CASE("tfidf without idf weights is an input error") {
  const Vocabulary vocab({"a"}, {1, 1}, 1);
  CHECK_THROWS_AS(vectorize(TokenList{"a"}, vocab, Weighting::TfIdf), Error);
}

TEST_CASE("bigram extraction joins adjacent words") {
  std::vector<std::string> grams;
  for_each_ngram(TokenList{"a", "b", "c"}, {1, 2}, [&](std::string_view g) { grams.emplace_back(g); });
  std::sort(grams.begin(), grams.end());
  CHECK(grams == std::vector<std::string>{"a", "a b", "b", "b c", "c"});
}

TEST_CASE("vocabulary tsv round-trip and hash") {
  const auto vocab = build_vocabulary(corpus({"x y z", "x y", "z w"}), {1, 2}, 1);
  const auto again = Vocabulary::from_tsv(vocab.to_tsv(), {1, 2}, 1);
  CHECK(again.terms() == vocab.terms());
  CHECK(again.hash() == vocab.hash());
  CHECK_THROWS_AS(Vocabulary::from_tsv("b\t0\na\t1\n", {1, 1}, 1), Error);
  CHECK_THROWS_AS(Vocabulary::from_tsv("a\t1\n", {1, 1}, 1), Error);
}

TEST_CASE("featurizer fitting is deterministic and records its ids") {
  const auto docs = corpus({"a b c", "a b", "c d", "a d"});
  const std::vector<std::string> ids{"d3", "d1", "d2", "d0"};
  FeaturizerConfig config;
  config.min_df = 1;
  config.weighting = Weighting::TfIdf;
  const auto f1 = Featurizer::fit(docs, ids, config);
  const auto f2 = Featurizer::fit(docs, ids, config);
  CHECK(f1.vocabulary().terms() == f2.vocabulary().terms());
  CHECK(f1.idf()->idf == f2.idf()->idf);
  CHECK(f1.fit_ids() == std::vector<std::string>{"d0", "d1", "d2", "d3"});
  CHECK(f1.disjoint_from(std::vector<std::string>{"x", "y"}));
  CHECK_FALSE(f1.disjoint_from(std::vector<std::string>{"d2"}));
  CHECK(f1.transform(tokenize("a b")) == f2.transform(tokenize("a b")));
  CHECK_THROWS_AS(Featurizer().transform({"a"}), Error);
}

TEST_CASE("featurizer config json round-trip") {
  FeaturizerConfig config{{1, 1}, 3, Weighting::TfIdf};
  CHECK(featurizer_config_from_json(to_json(config)) == config);
}
