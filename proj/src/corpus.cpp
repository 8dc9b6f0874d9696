#include "juris/corpus.hpp"

#include <expat.h>

#include <algorithm>
#include <array>
#include <iostream>
#include <memory>
#include <sstream>
#include <unordered_set>

#include "juris/archive.hpp"
#include "juris/error.hpp"
#include "juris/unicode.hpp"

namespace juris {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Incomplete: return "incomplete";
    case ErrorKind::Io: return "io";
    case ErrorKind::EmptyCorpus: return "empty-corpus";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::DegenerateTask: return "degenerate-task";
    case ErrorKind::Config: return "config";
    case ErrorKind::Input: return "input";
    case ErrorKind::Label: return "label";
    case ErrorKind::State: return "state";
    case ErrorKind::Integrity: return "integrity";
    case ErrorKind::Leakage: return "leakage";
  }
  return "unknown";
}

const char* to_string(Task task) {
  switch (task) {
    case Task::LawArea: return "LawArea";
    case Task::RulingFirstWord: return "RulingFirstWord";
    case Task::RulingFull: return "RulingFull";
    case Task::TimeBucket: return "TimeBucket";
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (Task task : kAllTasks) {
    if (name == to_string(task)) return task;
  }
  throw Error(ErrorKind::Config, "unknown task '" + std::string(name) +
                                     "' (expected LawArea, RulingFirstWord, RulingFull or TimeBucket)");
}

std::optional<std::size_t> LabelScheme::index_of(std::string_view name) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), name);
  if (it == classes.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - classes.begin());
}

// ---- XML --------------------------------------------------------------------

namespace {

enum Field { kId, kDescription, kLawArea, kRuling, kDate, kFieldCount };

struct ParseState {
  std::array<std::string, kFieldCount> names;
  std::array<std::optional<std::string>, kFieldCount> values;
  std::array<int, kFieldCount> capture_depth{};  // 0 = not capturing
  std::optional<std::string> root_id;
  int depth = 0;
};

std::string_view local_name(const XML_Char* name) {
  std::string_view qualified(name);
  const auto colon = qualified.rfind(':');
  return colon == std::string_view::npos ? qualified : qualified.substr(colon + 1);
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attributes) {
  auto& state = *static_cast<ParseState*>(user);
  ++state.depth;
  const auto local = local_name(name);
  if (state.depth == 1) {
    for (const XML_Char** a = attributes; a[0] != nullptr; a += 2) {
      if (local_name(a[0]) == state.names[kId]) state.root_id = a[1];
    }
  }
  for (int f = 0; f < kFieldCount; ++f) {
    if (state.capture_depth[f] == 0 && !state.values[f] && local == state.names[f]) {
      state.capture_depth[f] = state.depth;
      state.values[f] = std::string();
    }
  }
}

void XMLCALL on_end(void* user, const XML_Char*) {
  auto& state = *static_cast<ParseState*>(user);
  for (int f = 0; f < kFieldCount; ++f) {
    if (state.capture_depth[f] == state.depth) state.capture_depth[f] = 0;
  }
  --state.depth;
}

void XMLCALL on_text(void* user, const XML_Char* text, int length) {
  auto& state = *static_cast<ParseState*>(user);
  for (int f = 0; f < kFieldCount; ++f) {
    if (state.capture_depth[f] != 0) state.values[f]->append(text, static_cast<std::size_t>(length));
  }
}

std::optional<std::string> non_empty(std::optional<std::string> value) {
  if (!value) return std::nullopt;
  std::string collapsed = unicode::collapse_whitespace(*value);
  if (collapsed.empty()) return std::nullopt;
  return collapsed;
}

// First run of exactly four ASCII digits: "1995-03-14", "14/03/1995", "1995".
std::optional<int> parse_year(std::string_view date) {
  std::size_t i = 0;
  while (i < date.size()) {
    if (date[i] < '0' || date[i] > '9') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < date.size() && date[j] >= '0' && date[j] <= '9') ++j;
    if (j - i == 4) return std::stoi(std::string(date.substr(i, 4)));
    i = j;
  }
  return std::nullopt;
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

}  // namespace

CaseDocument parse_document(std::string_view xml_text, const SchemaMap& schema,
                            std::string_view fallback_id) {
  ParseState state;
  state.names = {schema.id, schema.description, schema.law_area, schema.ruling, schema.date};

  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
  if (!parser) throw Error(ErrorKind::Parse, "cannot allocate XML parser");
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);

  if (XML_Parse(parser.get(), xml_text.data(), static_cast<int>(xml_text.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    const auto offset = XML_GetCurrentByteIndex(parser.get());
    throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())),
                     offset < 0 ? std::optional<std::size_t>{}
                                : std::optional<std::size_t>{static_cast<std::size_t>(offset)});
  }
  if (!state.values[kDescription]) {
    throw Error(ErrorKind::Incomplete,
                "document has no <" + schema.description + "> element");
  }

  CaseDocument doc;
  if (auto id = non_empty(state.values[kId])) {
    doc.id = *id;
  } else if (auto root = non_empty(state.root_id)) {
    doc.id = *root;
  } else {
    doc.id = std::string(fallback_id);
  }
  doc.description = unicode::collapse_whitespace(*state.values[kDescription]);
  doc.law_area_raw = non_empty(state.values[kLawArea]);
  doc.ruling_raw = non_empty(state.values[kRuling]);
  if (auto date = non_empty(state.values[kDate])) doc.year = parse_year(*date);
  return doc;
}

IngestResult ingest_corpus(const std::filesystem::path& source, const SchemaMap& schema) {
  IngestResult result;
  std::unordered_set<std::string> seen_descriptions;
  std::unordered_set<std::string> seen_ids;

  for_each_xml_source(source, [&](std::string_view name, std::string_view contents) {
    ++result.stats.total_ingested;
    CaseDocument doc;
    try {
      doc = parse_document(contents, schema, name);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Parse && e.kind() != ErrorKind::Incomplete) throw;
      if (e.kind() == ErrorKind::Parse) std::cerr << "warning: skipping " << name << ": " << e.what() << '\n';
      ++result.stats.incomplete_removed;
      return;
    }
    if (doc.description.empty()) {
      ++result.stats.incomplete_removed;
      return;
    }
    if (!seen_descriptions.insert(doc.description).second) {
      ++result.stats.duplicates_removed;
      return;
    }
    // Distinct rulings that share an id keep both, disambiguated by source name.
    if (!seen_ids.insert(doc.id).second) {
      doc.id += "@" + std::string(name);
      seen_ids.insert(doc.id);
    }
    result.documents.push_back(std::move(doc));
  });

  if (result.documents.empty()) {
    throw Error(ErrorKind::EmptyCorpus, "no documents retained from " + source.string());
  }
  result.stats.per_class_counts = count_labels(result.documents);
  return result;
}

std::map<Task, std::map<std::string, std::size_t>> count_labels(
    std::span<const CaseDocument> documents) {
  std::map<Task, std::map<std::string, std::size_t>> counts;
  for (Task task : kAllTasks) {
    auto& per_class = counts[task];
    for (const auto& doc : documents) {
      if (auto label = task_label(doc, task)) ++per_class[*label];
    }
  }
  return counts;
}

// ---- labels -----------------------------------------------------------------

std::string normalize_label_text(std::string_view raw) {
  return unicode::collapse_whitespace(unicode::fold(raw));
}

std::optional<std::string> normalize_ruling_label(std::string_view ruling_raw, RulingForm form) {
  std::string normalized = normalize_label_text(ruling_raw);
  if (normalized.empty()) return std::nullopt;
  if (form == RulingForm::FirstWord) {
    const auto space = normalized.find(' ');
    if (space != std::string::npos) normalized.resize(space);
  }
  return normalized;
}

std::optional<std::string> normalize_ruling_label(std::string_view ruling_raw, RulingForm form,
                                                  const LabelScheme& scheme) {
  auto label = normalize_ruling_label(ruling_raw, form);
  if (!label || !scheme.index_of(*label)) return std::nullopt;
  return label;
}

const std::vector<std::string>& time_buckets() {
  static const std::vector<std::string> buckets = {
      "1960-1969", "1970-1979", "1980-1989", "1990-1999", "2000-2009", "2010-2016", "until-1959"};
  return buckets;
}

std::string assign_time_bucket(int year) {
  if (year < 1700 || year > 2016) {
    throw Error(ErrorKind::OutOfRange,
                "year " + std::to_string(year) + " outside the supported range 1700-2016");
  }
  if (year <= 1959) return "until-1959";
  if (year >= 2010) return "2010-2016";
  const int decade = year / 10 * 10;
  return std::to_string(decade) + "-" + std::to_string(decade + 9);
}

std::optional<std::string> task_label(const CaseDocument& doc, Task task) {
  switch (task) {
    case Task::LawArea:
      return doc.law_area_raw;
    case Task::RulingFirstWord:
      if (!doc.ruling_raw) return std::nullopt;
      return normalize_ruling_label(*doc.ruling_raw, RulingForm::FirstWord);
    case Task::RulingFull:
      if (!doc.ruling_raw) return std::nullopt;
      return normalize_ruling_label(*doc.ruling_raw, RulingForm::Full);
    case Task::TimeBucket:
      if (!doc.year || *doc.year < 1700 || *doc.year > 2016) return std::nullopt;
      return assign_time_bucket(*doc.year);
  }
  return std::nullopt;
}

std::optional<std::size_t> assign_class(const CaseDocument& doc, const LabelScheme& scheme) {
  const auto label = task_label(doc, scheme.task);
  if (!label) return std::nullopt;
  return scheme.index_of(*label);
}

LabelScheme build_label_scheme(std::span<const CaseDocument> documents, Task task,
                               std::size_t min_count) {
  if (documents.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot build a label scheme from an empty corpus");
  LabelScheme scheme;
  scheme.task = task;
  scheme.min_count = min_count;
  if (task == Task::TimeBucket) {
    scheme.classes = time_buckets();
    return scheme;
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : documents) {
    if (auto label = task_label(doc, task)) ++counts[*label];
  }
  for (const auto& [name, count] : counts) {
    if (count > min_count) scheme.classes.push_back(name);
  }
  if (scheme.classes.size() < 2) {
    throw Error(ErrorKind::DegenerateTask,
                std::string("task ") + to_string(task) + " retains " +
                    std::to_string(scheme.classes.size()) + " class(es) with more than " +
                    std::to_string(min_count) + " instances; at least 2 are required");
  }
  return scheme;
}

// ---- persistence ------------------------------------------------------------

namespace {

template <typename T>
nlohmann::json optional_json(const std::optional<T>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const CaseDocument& doc) {
  return nlohmann::json{{"id", doc.id},
                        {"description", doc.description},
                        {"law_area", optional_json(doc.law_area_raw)},
                        {"ruling", optional_json(doc.ruling_raw)},
                        {"year", optional_json(doc.year)}};
}

CaseDocument document_from_json(const nlohmann::json& j) {
  try {
    CaseDocument doc;
    doc.id = j.at("id").get<std::string>();
    doc.description = j.at("description").get<std::string>();
    if (j.contains("law_area") && !j["law_area"].is_null()) doc.law_area_raw = j["law_area"].get<std::string>();
    if (j.contains("ruling") && !j["ruling"].is_null()) doc.ruling_raw = j["ruling"].get<std::string>();
    if (j.contains("year") && !j["year"].is_null()) doc.year = j["year"].get<int>();
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid corpus record: ") + e.what(), std::nullopt);
  }
}

std::string write_corpus_jsonl(std::span<const CaseDocument> documents) {
  std::string out;
  for (const auto& doc : documents) {
    out += to_json(doc).dump();
    out += '\n';
  }
  return out;
}

std::vector<CaseDocument> read_corpus_jsonl(std::string_view text) {
  std::vector<CaseDocument> docs;
  std::size_t offset = 0;
  while (offset < text.size()) {
    auto end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(offset, end - offset);
    if (!line.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON line: ") + e.what(), offset + e.byte);
      }
      docs.push_back(document_from_json(j));
    }
    offset = end + 1;
  }
  return docs;
}

nlohmann::json to_json(const CorpusStats& stats) {
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [task, counts] : stats.per_class_counts) per_class[to_string(task)] = counts;
  return {{"total_ingested", stats.total_ingested},
          {"retained", stats.retained()},
          {"duplicates_removed", stats.duplicates_removed},
          {"incomplete_removed", stats.incomplete_removed},
          {"per_class_counts", per_class}};
}

nlohmann::json to_json(const LabelScheme& scheme) {
  return {{"task", to_string(scheme.task)}, {"classes", scheme.classes}, {"min_count", scheme.min_count}};
}

LabelScheme scheme_from_json(const nlohmann::json& j) {
  try {
    LabelScheme scheme;
    scheme.task = parse_task(j.at("task").get<std::string>());
    scheme.classes = j.at("classes").get<std::vector<std::string>>();
    scheme.min_count = j.value("min_count", std::size_t{200});
    if (!std::is_sorted(scheme.classes.begin(), scheme.classes.end()) ||
        std::adjacent_find(scheme.classes.begin(), scheme.classes.end()) != scheme.classes.end()) {
      throw Error(ErrorKind::Config, "scheme classes must be distinct and sorted");
    }
    return scheme;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("invalid label scheme: ") + e.what());
  }
}

}  // namespace juris
