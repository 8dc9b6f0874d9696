#include <doctest.h>

#include "juris/archive.hpp"
#include "juris/error.hpp"
#include "juris/masking.hpp"
#include "juris/unicode.hpp"
#include "synthetic.hpp"

using namespace juris;

TEST_CASE("label words are removed case-insensitively") {
  CHECK(mask_label_words("audience de la chambre sociale du ...", "CHAMBRE_SOCIALE") == "audience de la du ...");
  CHECK(mask_label_words("Chambre SOCIALE chambre", "CHAMBRE_SOCIALE") == "");
  CHECK(mask_label_words("rien  a  voir", "CHAMBRE_SOCIALE") == "rien a voir");
}

TEST_CASE("ruling masking removes nominal and verbal forms") {
  const auto& lexicon = default_ruling_lexicon();
  CHECK(mask_ruling("la cour casse et annule l'arret", "cassation", lexicon) == "la cour et l'arret");
  CHECK(mask_ruling("REJET: rejette le pourvoi", "rejet", lexicon) == ": le pourvoi");
  CHECK(mask_ruling("le pourvoi est examine", "rejet", lexicon) == "le pourvoi est examine");
  CHECK(mask_ruling("déclare le pourvoi IRRECEVABLE", "irrecevabilite", lexicon) == "déclare le pourvoi");
}

TEST_CASE("matching is on whole tokens") {
  const auto& lexicon = default_ruling_lexicon();
  CHECK(mask_ruling("une cassette et une casserole", "cassation", lexicon) == "une cassette et une casserole");
}

TEST_CASE("ruling masking needs a lexicon entry") {
  try {
    mask_ruling("texte", "inconnu", default_ruling_lexicon());
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("digit masking") {
  CHECK(mask_digits("vu l'article 1134 du code civil") == "vu l'article du code civil");
  CHECK(mask_digits("") == "");
  CHECK(mask_digits("an 2000, 12 janvier") == "an , janvier");
}

TEST_CASE("verify_masked counts residual forbidden tokens") {
  const std::unordered_set<std::string> forbidden{"cassation", "casse"};
  std::vector<std::string> clean{"la cour", "rien"};
  CHECK(verify_masked(clean, forbidden).residual_hits == 0);
  std::vector<std::string> planted{"la cour", "une Cassation ici"};
  const auto report = verify_masked(planted, forbidden);
  CHECK(report.residual_hits == 1);
  CHECK(report.documents_scanned == 2);
  const auto empty = verify_masked(std::vector<std::string>{}, forbidden);
  CHECK(empty.residual_hits == 0);
  CHECK(empty.documents_touched == 0);
}

TEST_CASE("lexicon parsing adds label words and splits hyphenated forms") {
  const auto lexicon = parse_lexicon("# comment\n\nnon-lieu\tnon-lieu\nrejet\trejette, Rejetée\n");
  CHECK(lexicon.entries.at("non-lieu") == std::set<std::string>{"non", "lieu"});
  CHECK(lexicon.entries.at("rejet") == std::set<std::string>{"rejet", "rejette", "rejetee"});
  CHECK(parse_lexicon(format_lexicon(lexicon)).entries == lexicon.entries);
  CHECK_THROWS_AS(parse_lexicon("no tab here\n"), Error);
}

TEST_CASE("embedded default lexicon matches the shipped data file") {
  const std::string shipped = read_file(std::string(JURIS_SOURCE_DIR) + "/data/ruling_lexicon.tsv");
  CHECK(default_lexicon_text() == shipped);
  const auto& lexicon = default_ruling_lexicon();
  for (const char* cls : {"cassation", "rejet", "irrecevabilite", "non-lieu", "annulation", "qpc"}) {
    CHECK(lexicon.covers(cls));
  }
}

TEST_CASE("task masker for law area removes all class words") {
  LabelScheme scheme{Task::LawArea, {"CHAMBRE_CIVILE_1", "CHAMBRE_SOCIALE"}, 200};
  const TaskMasker masker(scheme, default_ruling_lexicon());
  const auto result = masker.apply("la Chambre sociale et la chambre civile");
  CHECK(result.text == "la et la");
  CHECK(masker.residual_hits(result.text) == 0);
  CHECK(masker.apply("pas de mots ici").text == "pas de mots ici");
}

TEST_CASE("task masker for rulings rejects an incomplete lexicon") {
  LabelScheme scheme{Task::RulingFirstWord, {"cassation", "mystere"}, 200};
  CHECK_THROWS_AS(TaskMasker(scheme, default_ruling_lexicon()), Error);
}

TEST_CASE("task masker for time buckets strips digits only") {
  LabelScheme scheme{Task::TimeBucket, time_buckets(), 200};
  const TaskMasker masker(scheme, default_ruling_lexicon());
  const auto result = masker.apply("arret du 12 mars 1987, cassation");
  CHECK(result.text == "arret du mars , cassation");
  CHECK(unicode::count_decimal_digits(result.text) == 0);
}

TEST_CASE("masking is idempotent and complete on random texts") {
  LabelScheme scheme{Task::RulingFirstWord, {"annulation", "cassation", "irrecevabilite", "non-lieu", "qpc", "rejet"}, 200};
  const auto& lexicon = default_ruling_lexicon();
  const TaskMasker masker(scheme, lexicon);
  const auto forms_set = lexicon.forms_for(scheme.classes);
  const std::vector<std::string> forms(forms_set.begin(), forms_set.end());
  Rng rng(42);
  for (int i = 0; i < 300; ++i) {
    const std::string text = synthetic::random_text(rng, forms);
    const std::string once = masker.apply(text).text;
    CHECK(masker.apply(once).text == once);
    CHECK(masker.residual_hits(once) == 0);
  }
}
