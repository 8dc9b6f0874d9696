#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "juris/corpus.hpp"

namespace juris {

/// Folded (lowercase, accent-free) whole-token forms that reveal a class.
/// Every class entry contains the class's own label words.
struct MaskLexicon {
  std::map<std::string, std::set<std::string>> entries;

  bool covers(std::string_view class_name) const { return entries.count(std::string(class_name)) != 0; }
  /// Union of the forms of the given classes. Throws Error(Config) if any is missing.
  std::unordered_set<std::string> forms_for(std::span<const std::string> classes) const;
  std::unordered_set<std::string> all_forms() const;
};

struct MaskReport {
  std::size_t documents_scanned = 0;
  std::size_t documents_touched = 0;  // documents the masking pass changed
  std::size_t tokens_removed = 0;
  std::size_t residual_hits = 0;      // forbidden tokens left after masking
};

nlohmann::json to_json(const MaskReport& report);

/// Parses `class<TAB>form1,form2,...` lines; blank lines and lines starting
/// with '#' are skipped. Throws ParseError with the byte offset of a bad line.
MaskLexicon parse_lexicon(std::string_view text);
std::string format_lexicon(const MaskLexicon& lexicon);

/// The shipped ruling lexicon (also installed as data/ruling_lexicon.tsv).
const std::string& default_lexicon_text();
const MaskLexicon& default_ruling_lexicon();

/// Folded words of a class name: "CHAMBRE_SOCIALE" -> {"chambre", "sociale"}.
std::vector<std::string> label_words(std::string_view label);

struct MaskResult {
  std::string text;
  std::size_t tokens_removed = 0;
};

/// Deletes every word whose folded form is in `forbidden`, then collapses
/// white space. Non-word characters are kept.
MaskResult remove_forms(std::string_view text, const std::unordered_set<std::string>& forbidden);

std::string mask_label_words(std::string_view text, std::string_view label);

/// Removes the label's words and the forms of every lexicon class. Throws
/// Error(Config) if the lexicon has no entry for `label`.
std::string mask_ruling(std::string_view text, std::string_view label, const MaskLexicon& lexicon);

std::string mask_digits(std::string_view text);

/// Counts whole-token occurrences of forbidden forms across `texts`.
MaskReport verify_masked(std::span<const std::string> texts,
                         const std::unordered_set<std::string>& forbidden);

/// Applies the masking rule of one task to any description, independent of
/// that description's own label:
///   LawArea        words of every law-area class
///   Ruling*        lexicon forms of every ruling class in the scheme
///   TimeBucket     all decimal digits
class TaskMasker {
 public:
  /// Throws Error(Config) when a ruling scheme class is missing from `lexicon`.
  TaskMasker(const LabelScheme& scheme, const MaskLexicon& lexicon);

  MaskResult apply(std::string_view text) const;
  /// Forbidden tokens (or digits for TimeBucket) still present in `text`.
  std::size_t residual_hits(std::string_view text) const;

  Task task() const { return task_; }
  const std::unordered_set<std::string>& forbidden() const { return forbidden_; }

 private:
  Task task_;
  std::unordered_set<std::string> forbidden_;
};

}  // namespace juris
