#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "juris/corpus.hpp"
#include "juris/ensemble.hpp"

namespace juris {

struct FoldAssignment {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::map<std::string, std::size_t> assignment;  // document id -> fold
  std::vector<std::string> warnings;

  std::vector<std::string> ids_in_fold(std::size_t fold) const;
};

/// Within each class (lexicographic order), ids are shuffled by `seed` and
/// dealt round-robin; the dealing position carries over between classes so
/// fold sizes stay balanced. Classes with fewer than k ids are still dealt,
/// with a warning. Throws Error(Input) for k < 2.
FoldAssignment stratified_folds(const std::map<std::string, std::string>& labels, std::size_t k,
                                std::uint64_t seed);

/// Rows are gold classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;

  explicit ConfusionMatrix(std::vector<std::string> class_names = {});
  void add(std::size_t gold, std::size_t predicted, std::size_t n = 1);
  void merge(const ConfusionMatrix& other);
  std::size_t total() const;
  std::size_t trace() const;
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws Error(Input) when lengths differ or a label is not in the scheme.
ConfusionMatrix confusion_matrix(std::span<const std::string> gold, std::span<const std::string> pred,
                                 const LabelScheme& scheme);

enum class Averaging { Macro, Weighted };

const char* to_string(Averaging averaging);
Averaging parse_averaging(std::string_view name);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  bool operator==(const Metrics&) const = default;
};

/// Per-class P = diag/colsum, R = diag/rowsum, F1 = 2PR/(P+R), each 0 when
/// undefined. Macro averages over classes that occur as gold or predicted
/// labels; Weighted weights by gold support. Accuracy = trace / total.
/// Throws Error(Input) for an empty matrix.
Metrics metrics(const ConfusionMatrix& cm, Averaging averaging);

/// A document ready for training: masked text plus its class index.
struct LabeledDocument {
  std::string id;
  std::string text;
  std::size_t label = 0;
};

struct CvConfig {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::vector<MemberSpec> members = default_members();
  unsigned jobs = 1;
};

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  Metrics macro;
  Metrics weighted;
  ConfusionMatrix confusion;
  std::vector<std::string> missing_classes;  // scheme classes absent from this fold's test set
  bool leakage_checked = false;
};

struct EvaluationReport {
  std::string label;  // "mean-probability-ensemble" or "single-svm-baseline"
  Task task = Task::LawArea;
  std::vector<std::string> classes;
  std::vector<std::string> members;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  Metrics aggregate_macro;     // mean of per-fold values
  Metrics aggregate_weighted;
  ConfusionMatrix confusion;   // summed over folds
  std::vector<std::string> non_convergence_flags;
  std::vector<std::string> warnings;

  const Metrics& aggregate(Averaging averaging) const {
    return averaging == Averaging::Macro ? aggregate_macro : aggregate_weighted;
  }
};

/// Mean of per-fold metrics.
Metrics average_metrics(std::span<const Metrics> per_fold);

/// Throws Error(Leakage) unless every member's featurizer was fitted on a
/// subset of `train_ids` and on none of `test_ids`.
void assert_no_leakage(const EnsembleModel& ensemble, std::span<const std::string> train_ids,
                       std::span<const std::string> test_ids, std::size_t fold);

/// Stratified k-fold cross-validation. Featurizers and models are fitted on
/// the training folds only; the run throws Error(Leakage) if any fitted
/// featurizer saw a test document.
EvaluationReport run_cv(std::span<const LabeledDocument> docs, const LabelScheme& scheme,
                        const CvConfig& config);

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const EvaluationReport& report);

/// Aligned human-readable summary for the requested averaging schemes.
std::string format_report_table(const EvaluationReport& report, std::span<const Averaging> averaging);

/// Header row and first column hold the class names.
std::string format_confusion_csv(const ConfusionMatrix& cm);

}  // namespace juris
