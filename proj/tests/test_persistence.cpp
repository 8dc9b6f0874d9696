#include <doctest.h>

#include "juris/archive.hpp"
#include "juris/error.hpp"
#include "juris/persistence.hpp"
#include "synthetic.hpp"

using namespace juris;
namespace fs = std::filesystem;

namespace {

EnsembleModel small_ensemble(synthetic::Fixture& fixture) {
  fixture = synthetic::separable_fixture(3, 120, 13);
  std::vector<TokenList> tokens;
  std::vector<std::string> ids;
  std::vector<std::size_t> labels;
  for (const auto& d : fixture.docs) {
    tokens.push_back(tokenize(d.text));
    ids.push_back(d.id);
    labels.push_back(d.label);
  }
  auto members = default_members();
  members[0].probability = ProbabilityMode::Softmax;
  return train_ensemble(tokens, ids, labels, fixture.scheme, members, 2);
}

}  // namespace

TEST_CASE("save and load give identical predictions") {
  synthetic::Fixture fixture;
  const auto ensemble = small_ensemble(fixture);
  const auto dir = synthetic::temp_dir("persist");
  save_ensemble(ensemble, dir, {{"task", "LawArea"}});
  nlohmann::json manifest;
  const auto loaded = load_ensemble(dir / "manifest.json", &manifest);
  CHECK(manifest.at("task") == "LawArea");
  CHECK(loaded.scheme == ensemble.scheme);
  REQUIRE(loaded.members.size() == ensemble.members.size());
  for (std::size_t m = 0; m < loaded.members.size(); ++m) {
    CHECK(loaded.members[m].model.base.weights == ensemble.members[m].model.base.weights);
    CHECK(loaded.members[m].model.mode == ensemble.members[m].model.mode);
  }
  for (const auto& d : fixture.docs) {
    const auto a = predict(ensemble, d.text);
    const auto b = predict(loaded, d.text);
    CHECK(a.fused == b.fused);
    CHECK(a.class_index == b.class_index);
  }
}

TEST_CASE("saving twice is byte-identical") {
  synthetic::Fixture fixture;
  const auto ensemble = small_ensemble(fixture);
  const auto a = synthetic::temp_dir("persist-a");
  const auto b = synthetic::temp_dir("persist-b");
  save_ensemble(ensemble, a);
  save_ensemble(ensemble, b);
  for (const auto& entry : fs::directory_iterator(a)) {
    CHECK(read_file(entry.path()) == read_file(b / entry.path().filename()));
  }
}

TEST_CASE("tampered vocabulary is an integrity error") {
  synthetic::Fixture fixture;
  const auto ensemble = small_ensemble(fixture);
  const auto dir = synthetic::temp_dir("persist-tamper");
  save_ensemble(ensemble, dir);
  const auto vocab = dir / ("vocab_" + ensemble.members[1].id + ".tsv");
  std::string text = read_file(vocab);
  text.replace(0, text.find('\t'), "zzzz");
  write_file_atomic(vocab, text);
  try {
    load_ensemble(dir / "manifest.json");
    FAIL("expected an integrity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Integrity);
  }
}

TEST_CASE("manifest hash mismatch is an integrity error") {
  synthetic::Fixture fixture;
  const auto ensemble = small_ensemble(fixture);
  const auto dir = synthetic::temp_dir("persist-manifest");
  save_ensemble(ensemble, dir);
  auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  manifest["members"][0]["vocabulary_hash"] = "0000000000000000";
  write_file_atomic(dir / "manifest.json", manifest.dump());
  try {
    load_ensemble(dir / "manifest.json");
    FAIL("expected an integrity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Integrity);
  }
}

TEST_CASE("missing model files are reported") {
  CHECK_THROWS_AS(load_ensemble("/nonexistent/manifest.json"), Error);
}
