#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "juris/corpus.hpp"
#include "juris/ensemble.hpp"
#include "juris/evaluation.hpp"
#include "juris/masking.hpp"

namespace juris::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kUnexpected = 1,
  kValidation = 2,
  kMaskResidual = 3,
};

/// One experiment, loaded from a JSON file. Relative paths are resolved
/// against the directory holding the config file.
struct ExperimentConfig {
  std::filesystem::path corpus_source;
  SchemaMap schema;
  Task task = Task::LawArea;
  std::size_t min_count = 200;
  std::optional<std::filesystem::path> lexicon;  // default lexicon when absent
  std::vector<MemberSpec> members = default_members();
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  std::vector<Averaging> averaging = {Averaging::Weighted, Averaging::Macro};
  unsigned jobs = 1;

  std::filesystem::path corpus_file() const { return output_dir / "corpus.jsonl"; }
  std::filesystem::path masked_file() const { return output_dir / "masked.jsonl"; }
  std::filesystem::path scheme_file() const { return output_dir / "scheme.json"; }
  std::filesystem::path model_dir() const { return output_dir / "model"; }
};

/// Throws Error(Config) for malformed or invalid configuration values.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

MaskLexicon load_lexicon(const ExperimentConfig& config);

// Subcommands. Each throws juris::Error on failure; run() maps errors to
// exit codes.
CorpusStats cmd_ingest(const ExperimentConfig& config);
MaskReport cmd_mask(const ExperimentConfig& config);
EvaluationReport cmd_evaluate(const ExperimentConfig& config);
void cmd_train(const ExperimentConfig& config);
/// Writes one JSON line per input line. Texts are masked with the task's
/// rules unless `apply_mask` is false.
void cmd_predict(const std::filesystem::path& manifest, const std::filesystem::path& input,
                 std::ostream& out, bool apply_mask = true);
/// Per member and class, the top_n vocabulary terms by descending weight.
nlohmann::json cmd_audit_features(const std::filesystem::path& manifest, std::size_t top_n);

/// Reads the mask subcommand's output as training documents.
std::vector<LabeledDocument> read_masked_corpus(const std::filesystem::path& path, const LabelScheme& scheme);

/// Full command-line entry point: `juris <subcommand> --config PATH ...`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace juris::cli
