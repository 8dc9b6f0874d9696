#include <doctest.h>

#include <sstream>

#include "juris/archive.hpp"
#include "juris/cli.hpp"
#include "juris/unicode.hpp"
#include "synthetic.hpp"

using namespace juris;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kAreas{"CHAMBRE_CIVILE_1", "CHAMBRE_CRIMINELLE", "CHAMBRE_SOCIALE"};
const std::vector<std::string> kKeywords{"alpha", "bravo", "charlie"};
const std::vector<std::string> kRulings{"Cassation", "Rejet", "Irrecevabilité"};

struct Workspace {
  fs::path root;
  fs::path config;
  std::vector<CaseDocument> docs;
};

std::vector<CaseDocument> make_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CaseDocument> docs;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % 3;
    std::string text = "la chambre " + std::string(c == 2 ? "sociale" : c == 1 ? "criminelle" : "civile") + " ";
    for (int t = 0; t < 25; ++t) {
      if (rng.uniform() < 0.25) {
        text += kKeywords[c] + (t % 2 ? "s " : " ");
      } else {
        text += "mot" + std::to_string(rng.below(60)) + "x ";
      }
    }
    const std::size_t r = rng.below(3);
    text += r == 0 ? "la cour casse et annule l'arret" : r == 1 ? "REJETTE le pourvoi" : "declare irrecevable";
    text += " du 12 mars " + std::to_string(1950 + i % 60);
    docs.push_back({"case" + std::to_string(i), text, kAreas[c], kRulings[r], static_cast<int>(1950 + i % 60)});
  }
  return docs;
}

Workspace workspace(const std::string& name, nlohmann::json overrides = nlohmann::json::object()) {
  Workspace w;
  w.root = synthetic::temp_dir("cli-" + name);
  w.docs = make_corpus(150, 77);
  synthetic::write_xml_corpus(w.root / "corpus", w.docs);
  nlohmann::json config = {{"corpus", {{"source", "corpus"}}},
                           {"task", "LawArea"},
                           {"min_count", 10},
                           {"cv", {{"k", 3}, {"seed", 1}}},
                           {"output_dir", "out"}};
  config.merge_patch(overrides);
  w.config = w.root / "config.json";
  write_file_atomic(w.config, config.dump(2));
  return w;
}

struct Result {
  int code;
  std::string out, err;
};

Result juris_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Result step(const Workspace& w, const std::string& cmd, std::vector<std::string> extra = {}) {
  std::vector<std::string> args{cmd, "--config", w.config.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return juris_run(args);
}

std::vector<nlohmann::json> jsonl(const fs::path& path) {
  std::vector<nlohmann::json> out;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST_CASE("ingest writes one line per retained document and is reproducible") {
  const auto w = workspace("ingest");
  REQUIRE(step(w, "ingest").code == 0);
  const auto first = read_file(w.root / "out/corpus.jsonl");
  const auto stats = read_file(w.root / "out/corpus_stats.json");
  CHECK(jsonl(w.root / "out/corpus.jsonl").size() == w.docs.size());
  REQUIRE(step(w, "ingest").code == 0);
  CHECK(read_file(w.root / "out/corpus.jsonl") == first);
  CHECK(read_file(w.root / "out/corpus_stats.json") == stats);
}

TEST_CASE("missing source path exits with a validation error") {
  const auto w = workspace("nosource", {{"corpus", {{"source", "does-not-exist"}}}});
  const auto r = step(w, "ingest");
  CHECK(r.code == 2);
  CHECK(r.err.find("not found") != std::string::npos);
}

TEST_CASE("command-line usage errors exit with 2") {
  CHECK(juris_run({}).code == 2);
  CHECK(juris_run({"frobnicate"}).code == 2);
  CHECK(juris_run({"ingest"}).code == 2);
  CHECK(juris_run({"ingest", "--config", "/nonexistent.json"}).code == 2);
}

TEST_CASE("law area masking removes chamber words") {
  const auto w = workspace("mask-law");
  REQUIRE(step(w, "ingest").code == 0);
  const auto r = step(w, "mask");
  REQUIRE(r.code == 0);
  for (const auto& j : jsonl(w.root / "out/masked.jsonl")) {
    const auto text = unicode::fold(j.at("description").get<std::string>());
    for (const char* word : {"chambre", "sociale", "criminelle", "civile"}) {
      CHECK(text.find(std::string(" ") + word + " ") == std::string::npos);
    }
  }
  const auto report = nlohmann::json::parse(read_file(w.root / "out/mask_report.json"));
  CHECK(report.at("residual_hits") == 0);
  CHECK(report.at("documents_scanned") == 150);
}

TEST_CASE("ruling masking leaves no lexicon forms") {
  const auto w = workspace("mask-ruling", {{"task", "RulingFirstWord"}});
  REQUIRE(step(w, "ingest").code == 0);
  REQUIRE(step(w, "mask").code == 0);
  const auto scheme = scheme_from_json(nlohmann::json::parse(read_file(w.root / "out/scheme.json")));
  CHECK(scheme.classes == std::vector<std::string>{"cassation", "irrecevabilite", "rejet"});
  std::vector<std::string> texts;
  for (const auto& j : jsonl(w.root / "out/masked.jsonl")) texts.push_back(j.at("description"));
  const auto forms = default_ruling_lexicon().forms_for(scheme.classes);
  CHECK(verify_masked(texts, forms).residual_hits == 0);
}

TEST_CASE("time bucket masking removes digits") {
  const auto w = workspace("mask-time", {{"task", "TimeBucket"}});
  REQUIRE(step(w, "ingest").code == 0);
  REQUIRE(step(w, "mask").code == 0);
  for (const auto& j : jsonl(w.root / "out/masked.jsonl")) {
    CHECK(unicode::count_decimal_digits(j.at("description").get<std::string>()) == 0);
  }
}

TEST_CASE("a lexicon missing a scheme class exits with 2") {
  auto w = workspace("mask-lexicon", {{"task", "RulingFirstWord"}, {"masking", {{"lexicon", "lex.tsv"}}}});
  write_file_atomic(w.root / "lex.tsv", "rejet\trejette\n");
  REQUIRE(step(w, "ingest").code == 0);
  CHECK(step(w, "mask").code == 2);
}

TEST_CASE("evaluate writes the report files") {
  const auto w = workspace("evaluate");
  REQUIRE(step(w, "ingest").code == 0);
  REQUIRE(step(w, "mask").code == 0);
  const auto r = step(w, "evaluate");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("mean-probability-ensemble") != std::string::npos);
  const auto report = nlohmann::json::parse(read_file(w.root / "out/report.json"));
  CHECK(report.at("aggregate").at("weighted").at("f1").get<double>() >= 0.95);
  CHECK(report.at("per_fold").size() == 3);
  CHECK(fs::exists(w.root / "out/report.txt"));
  CHECK(read_file(w.root / "out/confusion.csv").rfind("gold\\predicted,", 0) == 0);
}

TEST_CASE("single member config runs the baseline") {
  const auto w = workspace("baseline", {{"members", {to_json(baseline_member())}}});
  REQUIRE(step(w, "ingest").code == 0);
  REQUIRE(step(w, "mask").code == 0);
  REQUIRE(step(w, "evaluate").code == 0);
  const auto report = nlohmann::json::parse(read_file(w.root / "out/report.json"));
  CHECK(report.at("label") == "single-svm-baseline");
}

TEST_CASE("invalid fold count exits with 2") {
  const auto w = workspace("badk", {{"cv", {{"k", 1}}}});
  CHECK(step(w, "ingest").code == 2);
}

TEST_CASE("train, predict and audit") {
  const auto w = workspace("train");
  REQUIRE(step(w, "ingest").code == 0);
  REQUIRE(step(w, "mask").code == 0);
  REQUIRE(step(w, "train").code == 0);
  const auto manifest = w.root / "out/model/manifest.json";
  REQUIRE(fs::exists(manifest));

  std::string input;
  for (std::size_t i = 0; i < 6; ++i) input += w.docs[i].description + "\n";
  input += "\n";
  write_file_atomic(w.root / "input.txt", input);
  const auto r = step(w, "predict", {"--input", (w.root / "input.txt").string(), "--output",
                                     (w.root / "pred.jsonl").string()});
  REQUIRE(r.code == 0);
  const auto predictions = jsonl(w.root / "pred.jsonl");
  REQUIRE(predictions.size() == 7);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(predictions[i].at("index") == i);
    CHECK(predictions[i].at("prediction") == *w.docs[i].law_area_raw);
  }
  double sum = 0.0;
  for (const auto& [cls, p] : predictions[6].at("probabilities").items()) sum += p.get<double>();
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

  // same manifest through --manifest and stdout
  const auto direct = juris_run({"predict", "--manifest", manifest.string(), "--input", (w.root / "input.txt").string()});
  REQUIRE(direct.code == 0);
  CHECK(direct.out == read_file(w.root / "pred.jsonl"));

  const auto audit = step(w, "audit-features", {"--top-n", "5"});
  REQUIRE(audit.code == 0);
  const auto features = nlohmann::json::parse(read_file(w.root / "out/audit_features.json"));
  for (const auto& [member, per_class] : features.items()) {
    CAPTURE(member);
    bool found = false;
    for (const auto& entry : per_class.at("CHAMBRE_CIVILE_1")) {
      found = found || entry.at("term").get<std::string>().find("alpha") != std::string::npos;
    }
    CHECK(found);
    CHECK(per_class.at("CHAMBRE_SOCIALE").size() == 5);
  }
  const auto none = juris_run({"audit-features", "--manifest", manifest.string(), "--top-n", "0"});
  REQUIRE(none.code == 0);
  for (const auto& [member, per_class] : nlohmann::json::parse(none.out).items()) {
    for (const auto& [cls, list] : per_class.items()) CHECK(list.empty());
  }
}

TEST_CASE("audit without a model is a state error") {
  const auto w = workspace("audit-untrained");
  const auto r = step(w, "audit-features");
  CHECK(r.code == 2);
  CHECK(r.err.find("state") != std::string::npos);
}

TEST_CASE("predict rejects a model whose vocabulary was altered") {
  const auto w = workspace("tamper", {{"members", {to_json(baseline_member())}}});
  REQUIRE(step(w, "ingest").code == 0);
  REQUIRE(step(w, "mask").code == 0);
  REQUIRE(step(w, "train").code == 0);
  const auto vocab = w.root / "out/model/vocab_unigram-bigram-counts.tsv";
  write_file_atomic(vocab, "aaa\t0\n" + read_file(vocab).substr(read_file(vocab).find('\n') + 1));
  write_file_atomic(w.root / "input.txt", "texte\n");
  const auto r = step(w, "predict", {"--input", (w.root / "input.txt").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("integrity") != std::string::npos);
}
