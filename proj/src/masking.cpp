#include "juris/masking.hpp"

#include "juris/error.hpp"
#include "juris/unicode.hpp"

namespace juris {

std::unordered_set<std::string> MaskLexicon::forms_for(std::span<const std::string> classes) const {
  std::unordered_set<std::string> forms;
  for (const auto& name : classes) {
    const auto it = entries.find(name);
    if (it == entries.end()) {
      throw Error(ErrorKind::Config, "mask lexicon has no entry for class '" + name + "'");
    }
    forms.insert(it->second.begin(), it->second.end());
  }
  return forms;
}

std::unordered_set<std::string> MaskLexicon::all_forms() const {
  std::unordered_set<std::string> forms;
  for (const auto& [name, entry] : entries) forms.insert(entry.begin(), entry.end());
  return forms;
}

nlohmann::json to_json(const MaskReport& report) {
  return {{"documents_scanned", report.documents_scanned},
          {"documents_touched", report.documents_touched},
          {"tokens_removed", report.tokens_removed},
          {"residual_hits", report.residual_hits}};
}

std::vector<std::string> label_words(std::string_view label) {
  std::vector<std::string> words;
  for (const auto& span : unicode::find_words(label)) {
    words.push_back(unicode::fold(label.substr(span.begin, span.end - span.begin)));
  }
  return words;
}

MaskLexicon parse_lexicon(std::string_view text) {
  MaskLexicon lexicon;
  std::size_t offset = 0;
  while (offset < text.size()) {
    auto end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(offset, end - offset);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '#') {
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos || tab == 0) {
        throw ParseError("lexicon line is not 'class<TAB>forms'", offset);
      }
      const std::string name = normalize_label_text(line.substr(0, tab));
      auto& entry = lexicon.entries[name];
      for (auto& word : label_words(name)) entry.insert(std::move(word));

      std::string_view forms = line.substr(tab + 1);
      while (!forms.empty()) {
        const auto comma = forms.find(',');
        const auto form = forms.substr(0, comma);
        // A form like "non-lieu" contributes each of its words.
        for (auto& word : label_words(form)) entry.insert(std::move(word));
        if (comma == std::string_view::npos) break;
        forms.remove_prefix(comma + 1);
      }
    }
    offset = end + 1;
  }
  return lexicon;
}

std::string format_lexicon(const MaskLexicon& lexicon) {
  std::string out;
  for (const auto& [name, forms] : lexicon.entries) {
    out += name;
    out += '\t';
    bool first = true;
    for (const auto& form : forms) {
      if (!first) out += ',';
      out += form;
      first = false;
    }
    out += '\n';
  }
  return out;
}

const MaskLexicon& default_ruling_lexicon() {
  static const MaskLexicon lexicon = parse_lexicon(default_lexicon_text());
  return lexicon;
}

MaskResult remove_forms(std::string_view text, const std::unordered_set<std::string>& forbidden) {
  MaskResult result;
  std::string kept;
  kept.reserve(text.size());
  std::size_t copied = 0;
  for (const auto& span : unicode::find_words(text)) {
    if (forbidden.count(unicode::fold(text.substr(span.begin, span.end - span.begin))) == 0) continue;
    kept.append(text.substr(copied, span.begin - copied));
    copied = span.end;
    ++result.tokens_removed;
  }
  kept.append(text.substr(copied));
  result.text = unicode::collapse_whitespace(kept);
  return result;
}

std::string mask_label_words(std::string_view text, std::string_view label) {
  const auto words = label_words(label);
  return remove_forms(text, {words.begin(), words.end()}).text;
}

std::string mask_ruling(std::string_view text, std::string_view label, const MaskLexicon& lexicon) {
  if (!lexicon.covers(label)) {
    throw Error(ErrorKind::Config, "mask lexicon has no entry for class '" + std::string(label) + "'");
  }
  auto forbidden = lexicon.all_forms();
  for (auto& word : label_words(label)) forbidden.insert(std::move(word));
  return remove_forms(text, forbidden).text;
}

std::string mask_digits(std::string_view text) {
  return unicode::collapse_whitespace(unicode::remove_decimal_digits(text));
}

namespace {

std::size_t count_forbidden(std::string_view text, const std::unordered_set<std::string>& forbidden) {
  std::size_t hits = 0;
  for (const auto& span : unicode::find_words(text)) {
    hits += forbidden.count(unicode::fold(text.substr(span.begin, span.end - span.begin)));
  }
  return hits;
}

}  // namespace

MaskReport verify_masked(std::span<const std::string> texts,
                         const std::unordered_set<std::string>& forbidden) {
  MaskReport report;
  for (const auto& text : texts) {
    ++report.documents_scanned;
    report.residual_hits += count_forbidden(text, forbidden);
  }
  return report;
}

TaskMasker::TaskMasker(const LabelScheme& scheme, const MaskLexicon& lexicon) : task_(scheme.task) {
  switch (task_) {
    case Task::LawArea:
      for (const auto& name : scheme.classes) {
        for (auto& word : label_words(name)) forbidden_.insert(std::move(word));
      }
      break;
    case Task::RulingFirstWord:
    case Task::RulingFull:
      forbidden_ = lexicon.forms_for(scheme.classes);
      break;
    case Task::TimeBucket:
      break;
  }
}

MaskResult TaskMasker::apply(std::string_view text) const {
  if (task_ == Task::TimeBucket) {
    return {mask_digits(text), unicode::count_decimal_digits(text)};
  }
  return remove_forms(text, forbidden_);
}

std::size_t TaskMasker::residual_hits(std::string_view text) const {
  if (task_ == Task::TimeBucket) return unicode::count_decimal_digits(text);
  return count_forbidden(text, forbidden_);
}

}  // namespace juris
