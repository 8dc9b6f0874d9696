#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace juris {

enum class Task { LawArea, RulingFirstWord, RulingFull, TimeBucket };

const char* to_string(Task task);
/// Accepts the canonical names ("LawArea", ...). Throws Error(Config).
Task parse_task(std::string_view name);
inline constexpr Task kAllTasks[] = {Task::LawArea, Task::RulingFirstWord, Task::RulingFull,
                                     Task::TimeBucket};

/// One court ruling. Metadata fields that were absent in the source stay absent.
struct CaseDocument {
  std::string id;
  std::string description;
  std::optional<std::string> law_area_raw;
  std::optional<std::string> ruling_raw;
  std::optional<int> year;

  bool operator==(const CaseDocument&) const = default;
};

/// Element names used to locate each field inside a ruling's XML. The id may
/// also be supplied as an attribute of the root element; when neither exists
/// the source file name is used.
struct SchemaMap {
  std::string id = "id";
  std::string description = "description";
  std::string law_area = "law_area";
  std::string ruling = "ruling";
  std::string date = "date";
};

struct CorpusStats {
  std::size_t total_ingested = 0;
  std::size_t duplicates_removed = 0;
  std::size_t incomplete_removed = 0;
  std::map<Task, std::map<std::string, std::size_t>> per_class_counts;

  std::size_t retained() const { return total_ingested - duplicates_removed - incomplete_removed; }
};

struct LabelScheme {
  Task task = Task::LawArea;
  std::vector<std::string> classes;  // lexicographic
  std::size_t min_count = 200;

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t size() const { return classes.size(); }
  bool operator==(const LabelScheme&) const = default;
};

enum class RulingForm { FirstWord, Full };

// ---- parsing & ingestion ----------------------------------------------------

/// Parses one ruling. Throws ParseError (with byte offset) for malformed XML
/// and Error(Incomplete) when no description element exists. `fallback_id`
/// is used when the document carries no id of its own.
CaseDocument parse_document(std::string_view xml_text, const SchemaMap& schema = {},
                            std::string_view fallback_id = {});

struct IngestResult {
  std::vector<CaseDocument> documents;
  CorpusStats stats;
};

/// Reads every XML member of `source`, dropping incomplete documents and
/// duplicates (identical description after whitespace normalization; the
/// first in name order wins). Malformed files count as incomplete.
/// Throws Error(Io) for unreadable sources and Error(EmptyCorpus) when
/// nothing is retained.
IngestResult ingest_corpus(const std::filesystem::path& source, const SchemaMap& schema = {});

/// Computes per-task class counts over normalized labels (before any
/// min-count threshold).
std::map<Task, std::map<std::string, std::size_t>> count_labels(
    std::span<const CaseDocument> documents);

// ---- label normalization ----------------------------------------------------

/// Lowercases, strips accents and collapses whitespace.
std::string normalize_label_text(std::string_view raw);

/// Normalized ruling class candidate, or nullopt for an empty label.
std::optional<std::string> normalize_ruling_label(std::string_view ruling_raw, RulingForm form);

/// As above, but nullopt when the class is not retained by `scheme`.
std::optional<std::string> normalize_ruling_label(std::string_view ruling_raw, RulingForm form,
                                                  const LabelScheme& scheme);

/// Throws Error(OutOfRange) for years outside 1700..2016.
std::string assign_time_bucket(int year);

/// The seven decade buckets in lexicographic order.
const std::vector<std::string>& time_buckets();

/// The document's class candidate for `task` before scheme filtering.
std::optional<std::string> task_label(const CaseDocument& doc, Task task);

/// The document's class index in `scheme`, or nullopt if excluded.
std::optional<std::size_t> assign_class(const CaseDocument& doc, const LabelScheme& scheme);

/// Keeps classes whose count is strictly greater than min_count (TimeBucket
/// always uses the fixed buckets). Throws Error(DegenerateTask) for fewer
/// than two classes and Error(EmptyCorpus) for an empty corpus.
LabelScheme build_label_scheme(std::span<const CaseDocument> documents, Task task,
                               std::size_t min_count = 200);

// ---- persistence ------------------------------------------------------------

nlohmann::json to_json(const CaseDocument& doc);
CaseDocument document_from_json(const nlohmann::json& j);

/// One JSON object per line, fields id, description, law_area, ruling, year.
std::string write_corpus_jsonl(std::span<const CaseDocument> documents);
std::vector<CaseDocument> read_corpus_jsonl(std::string_view text);

nlohmann::json to_json(const CorpusStats& stats);
nlohmann::json to_json(const LabelScheme& scheme);
LabelScheme scheme_from_json(const nlohmann::json& j);

}  // namespace juris
