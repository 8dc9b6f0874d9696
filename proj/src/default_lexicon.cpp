#include "juris/masking.hpp"

namespace juris {

// Keep in sync with data/ruling_lexicon.tsv (checked by test_masking).
const std::string& default_lexicon_text() {
  static const std::string text = R"LEXICON(# juris ruling mask lexicon, version 1
# class<TAB>comma-separated surface forms
# Forms are matched as whole tokens after lowercasing and accent stripping.
# Each class's own label words are added automatically when the file is loaded.
annulation	annulation,annulations,annule,annules,annulee,annulees,annuler,annulent,annulant,annulera,annuleront,annulerait
cassation	cassation,cassations,casse,casses,cassee,cassees,casser,cassent,cassant,cassera,casseront,casserait
cassation partielle	cassation,cassations,casse,casses,cassee,cassees,casser,cassent,cassant,cassera,casseront,casserait,partielle,partielles,partiellement
cassation partielle cassation	cassation,cassations,casse,casses,cassee,cassees,casser,cassent,cassant,cassera,casseront,casserait,partielle,partielles,partiellement
cassation partielle rejet cassation	cassation,cassations,casse,casses,cassee,cassees,casser,cassent,cassant,cassera,casseront,casserait,partielle,partielles,partiellement,rejet,rejets,rejette,rejettes,rejete,rejetes,rejetee,rejetees,rejeter,rejettent,rejetant,rejettera,rejetteront,rejetterait
cassation partielle sans renvoi	cassation,cassations,casse,casses,cassee,cassees,casser,cassent,cassant,cassera,casseront,casserait,partielle,partielles,partiellement,sans,renvoi,renvoie,renvoyer
cassation sans renvoi	cassation,cassations,casse,casses,cassee,cassees,casser,cassent,cassant,cassera,casseront,casserait,sans,renvoi,renvoie,renvoyer
irrecevabilite	irrecevabilite,irrecevabilites,irrecevable,irrecevables
non-lieu	non-lieu
qpc	qpc,prioritaire,constitutionnalite
rejet	rejet,rejets,rejette,rejettes,rejete,rejetes,rejetee,rejetees,rejeter,rejettent,rejetant,rejettera,rejetteront,rejetterait
)LEXICON";
  return text;
}

}  // namespace juris
